//! Orbit databases keyed by invariants, with fusion and splitting.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::exactlin::{rank, RationalMatrix};
use crate::faceset::FaceSet;
use crate::permgrp::PermGroup;
use crate::symdetect::ColoredGraph;

/// Invariants that agree on equivalent sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitKey {
    pub cardinality: usize,
    pub rank: Option<usize>,
    /// Sorted colors of all pairs `i ≤ j` inside the set.
    pub metric_fingerprint: Option<Vec<u32>>,
    /// Number of members in each point orbit of the group.
    pub orbit_profile: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Open,
    Closed,
}

/// How membership in a stored orbit is decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Equivalence {
    /// Compare canonical representatives.
    #[default]
    Canonical,
    /// Search for a mapping to each stored representative of the bucket.
    RepresentativeAction,
}

#[derive(Clone, Debug)]
pub struct OrbitEntry {
    pub representative: FaceSet,
    pub orbit_size: BigUint,
    pub stabilizer: PermGroup,
    pub status: Status,
}

#[derive(Default)]
struct Store {
    entries: Vec<OrbitEntry>,
    buckets: HashMap<OrbitKey, Vec<usize>>,
}

/// Pairwise inequivalent representatives of orbits under a group.
///
/// Insertion is linearizable: the probe and the store happen under one lock.
pub struct OrbitDatabase {
    group: PermGroup,
    rays: Option<RationalMatrix>,
    metric: Option<ColoredGraph>,
    point_label: Vec<usize>,
    num_point_orbits: usize,
    mode: Equivalence,
    store: Mutex<Store>,
}

impl OrbitDatabase {
    pub fn new(group: PermGroup) -> Self {
        let orbits = group.point_orbits();
        let mut point_label = vec![0; group.degree()];
        for (k, orbit) in orbits.iter().enumerate() {
            for &p in orbit {
                point_label[p] = k;
            }
        }
        Self {
            num_point_orbits: orbits.len(),
            group,
            rays: None,
            metric: None,
            point_label,
            mode: Equivalence::default(),
            store: Mutex::new(Store::default()),
        }
    }

    /// Adds the rank of the spanned rays to the key. Sound for faces, and
    /// for any set when the group acts linearly.
    pub fn with_rays(mut self, rays: RationalMatrix) -> Self {
        self.rays = Some(rays);
        self
    }

    /// Adds the metric fingerprint to the key; only sound when the group
    /// consists of restricted automorphisms of the colored family.
    pub fn with_metric(mut self, graph: ColoredGraph) -> Self {
        self.metric = Some(graph);
        self
    }

    pub fn with_equivalence(mut self, mode: Equivalence) -> Self {
        self.mode = mode;
        self
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn key(&self, s: &FaceSet) -> OrbitKey {
        let mut profile = vec![0; self.num_point_orbits];
        for i in s.iter() {
            profile[self.point_label[i]] += 1;
        }
        let metric_fingerprint = self.metric.as_ref().map(|g| {
            let idx = s.indices();
            let mut colors = Vec::with_capacity(idx.len() * (idx.len() + 1) / 2);
            for (a, &i) in idx.iter().enumerate() {
                colors.push(g.vertex_colors[i]);
                for &j in &idx[a + 1..] {
                    colors.push(g.edge(i, j));
                }
            }
            colors.sort_unstable();
            colors
        });
        OrbitKey {
            cardinality: s.len(),
            rank: self
                .rays
                .as_ref()
                .map(|r| rank(&r.select_rows(s.indices()))),
            metric_fingerprint,
            orbit_profile: profile,
        }
    }

    /// Stores the orbit of `s` unless already present. Returns whether it
    /// was new, the stored representative and its entry index.
    pub fn insert_if_new(&self, s: &FaceSet) -> (bool, FaceSet, usize) {
        let key = self.key(s);
        let canonical = match self.mode {
            Equivalence::Canonical => Some(self.group.canonical_representative(s)),
            Equivalence::RepresentativeAction => None,
        };
        let mut store = self.store.lock().unwrap();
        if let Some(bucket) = store.buckets.get(&key) {
            for &k in bucket {
                let rep = &store.entries[k].representative;
                let same = match &canonical {
                    Some(c) => c == rep,
                    None => self.group.representative_action(s, rep).is_some(),
                };
                if same {
                    return (false, rep.clone(), k);
                }
            }
        }
        let rep = canonical.unwrap_or_else(|| self.group.canonical_representative(s));
        let stabilizer = self.group.set_stabilizer(&rep);
        let orbit_size = self.group.order() / stabilizer.order();
        let k = store.entries.len();
        store.entries.push(OrbitEntry {
            representative: rep.clone(),
            orbit_size,
            stabilizer,
            status: Status::Open,
        });
        store.buckets.entry(key).or_default().push(k);
        (true, rep, k)
    }

    /// Index of the stored orbit containing `s`, if any.
    pub fn find(&self, s: &FaceSet) -> Option<usize> {
        let key = self.key(s);
        let store = self.store.lock().unwrap();
        let bucket = store.buckets.get(&key)?;
        match self.mode {
            Equivalence::Canonical => {
                let c = self.group.canonical_representative(s);
                bucket
                    .iter()
                    .copied()
                    .find(|&k| store.entries[k].representative == c)
            }
            Equivalence::RepresentativeAction => bucket.iter().copied().find(|&k| {
                self.group
                    .representative_action(s, &store.entries[k].representative)
                    .is_some()
            }),
        }
    }

    pub fn len(&self) -> usize {
        self.store.lock().unwrap().entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn entry(&self, k: usize) -> OrbitEntry {
        self.store.lock().unwrap().entries[k].clone()
    }

    /// Snapshot of all entries in insertion order.
    pub fn entries(&self) -> Vec<OrbitEntry> {
        self.store.lock().unwrap().entries.clone()
    }

    pub fn representatives(&self) -> Vec<FaceSet> {
        self.store
            .lock()
            .unwrap()
            .entries
            .iter()
            .map(|e| e.representative.clone())
            .collect()
    }

    /// Representatives in sorted order; independent of insertion order.
    pub fn sorted_representatives(&self) -> Vec<FaceSet> {
        let mut reps = self.representatives();
        reps.sort();
        reps
    }

    pub fn set_status(&self, k: usize, status: Status) {
        self.store.lock().unwrap().entries[k].status = status;
    }

    pub fn open_indices(&self) -> Vec<usize> {
        let store = self.store.lock().unwrap();
        (0..store.entries.len())
            .filter(|&k| store.entries[k].status == Status::Open)
            .collect()
    }

    /// Sum of orbit sizes, i.e. the number of sets covered.
    pub fn total_size(&self) -> BigUint {
        self.store
            .lock()
            .unwrap()
            .entries
            .iter()
            .map(|e| e.orbit_size.clone())
            .sum()
    }
}

/// Orbits under `g1` fused into orbits under the larger group `g2`.
pub fn fuse(list: &[FaceSet], g1: &PermGroup, g2: &PermGroup) -> Result<OrbitDatabase> {
    if let Some(g) = g1.generators().iter().find(|g| !g2.contains(g)) {
        return Err(Error::NotASubgroup(g.to_string()));
    }
    let db = OrbitDatabase::new(g2.clone());
    for s in list {
        db.insert_if_new(s);
    }
    Ok(db)
}

/// Orbits under `g1` split into orbits under the smaller group `g2`.
pub fn split(reps: &[FaceSet], g1: &PermGroup, g2: &PermGroup) -> Result<Vec<FaceSet>> {
    let mut out = Vec::new();
    for r in reps {
        out.extend(g1.double_coset_split(g2, r)?);
    }
    Ok(out)
}
