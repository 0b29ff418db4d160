//! Cache of solved subcones, keyed by metric invariants and matched up to
//! restricted isomorphism.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Mutex;

use crate::conemodel::Cone;
use crate::error::{Error, Result};
use crate::exactlin::{Rational, RationalMatrix};
use crate::faceset::FaceSet;
use crate::permgrp::{PermGroup, Permutation};
use crate::symdetect::{build_with_palette, restricted_isomorphism};

/// Number of rays, dimension, and the sorted multisets of vertex and edge
/// colors (as rational values, so they compare across cones).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    pub rays: usize,
    pub dim: usize,
    pub vertex_values: Vec<Rational>,
    pub edge_values: Vec<Rational>,
}

impl Fingerprint {
    pub fn of(rays: &RationalMatrix) -> Result<Self> {
        let (g, palette) = build_with_palette(rays)?;
        let mut vertex_values: Vec<Rational> = g
            .vertex_colors
            .iter()
            .map(|&c| palette[c as usize].clone())
            .collect();
        vertex_values.sort();
        let mut edge_values = Vec::new();
        for i in 0..g.n {
            for j in i + 1..g.n {
                edge_values.push(palette[g.edge(i, j) as usize].clone());
            }
        }
        edge_values.sort();
        Ok(Self {
            rays: rays.rows(),
            dim: rays.cols(),
            vertex_values,
            edge_values,
        })
    }
}

#[derive(Clone, Debug)]
pub struct BankEntry {
    pub rays: RationalMatrix,
    pub group: PermGroup,
    pub facet_orbit_reps: Vec<FaceSet>,
}

#[derive(Default)]
struct Inner {
    entries: Vec<BankEntry>,
    index: HashMap<Fingerprint, Vec<usize>>,
}

/// Thread-safe store of solved subcones.
#[derive(Default)]
pub struct Bank {
    inner: Mutex<Inner>,
}

impl std::fmt::Debug for Bank {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Bank({} entries)", self.len())
    }
}

/// `x -> sigma(g(sigma^-1(x)))`.
fn conjugate(g: &Permutation, sigma: &Permutation) -> Permutation {
    sigma.inverse().then(g).then(sigma)
}

impl Bank {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap().entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn entries(&self) -> Vec<BankEntry> {
        self.inner.lock().unwrap().entries.clone()
    }

    /// A stored entry isomorphic to `rays`, with the ray bijection from the
    /// entry onto `rays` and its linear witness.
    pub fn find(
        &self,
        rays: &RationalMatrix,
    ) -> Result<Option<(BankEntry, Permutation, RationalMatrix)>> {
        let fp = Fingerprint::of(rays)?;
        let candidates: Vec<BankEntry> = {
            let inner = self.inner.lock().unwrap();
            match inner.index.get(&fp) {
                Some(ks) => ks.iter().map(|&k| inner.entries[k].clone()).collect(),
                None => return Ok(None),
            }
        };
        for e in candidates {
            if let Some((sigma, a)) = restricted_isomorphism(&e.rays, rays)? {
                return Ok(Some((e, sigma, a)));
            }
        }
        Ok(None)
    }

    /// Facet orbit representatives of `c` under `group`, transported from
    /// an isomorphic stored entry.
    pub fn lookup(&self, c: &Cone, group: &PermGroup) -> Result<Option<Vec<FaceSet>>> {
        let Some((entry, sigma, _)) = self.find(c.rays())? else {
            return Ok(None);
        };
        let moved = PermGroup::new(
            c.num_rays(),
            entry
                .group
                .generators()
                .iter()
                .map(|g| conjugate(g, &sigma))
                .collect(),
        )?;
        let joint = moved.join(group)?;
        let mut fused: Vec<FaceSet> = entry
            .facet_orbit_reps
            .iter()
            .map(|s| joint.canonical_representative(&sigma.apply_set(s)))
            .collect();
        fused.sort();
        fused.dedup();
        let mut out = Vec::new();
        for s in &fused {
            out.extend(joint.double_coset_split(group, s)?);
        }
        Ok(Some(out))
    }

    /// Stores a solved cone unless an isomorphic one is present. Returns
    /// whether an entry was added.
    pub fn store(&self, c: &Cone, group: &PermGroup, reps: &[FaceSet]) -> Result<bool> {
        if self.find(c.rays())?.is_some() {
            return Ok(false);
        }
        self.push(BankEntry {
            rays: c.rays().clone(),
            group: group.clone(),
            facet_orbit_reps: reps.to_vec(),
        })?;
        Ok(true)
    }

    fn push(&self, entry: BankEntry) -> Result<()> {
        let fp = Fingerprint::of(&entry.rays)?;
        let mut inner = self.inner.lock().unwrap();
        let k = inner.entries.len();
        inner.entries.push(entry);
        inner.index.entry(fp).or_default().push(k);
        Ok(())
    }

    /// Text form: a header line, then per entry a `rays n d` block, a
    /// `group k` block of cycle strings and a `facets m` block of 1-based
    /// index lists in braces.
    pub fn export(&self) -> String {
        let mut out = String::from("# symcone-format 1\nbank\n");
        for e in self.entries() {
            let _ = writeln!(out, "rays {} {}", e.rays.rows(), e.rays.cols());
            for row in e.rays.row_iter() {
                let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(out, "{}", cells.join(" "));
            }
            let _ = writeln!(out, "group {}", e.group.generators().len());
            for g in e.group.generators() {
                let _ = writeln!(out, "{}", g.to_cycle_string());
            }
            let _ = writeln!(out, "facets {}", e.facet_orbit_reps.len());
            for s in &e.facet_orbit_reps {
                let _ = writeln!(out, "{s:?}");
            }
        }
        out
    }

    pub fn import(text: &str) -> Result<Bank> {
        let bank = Bank::new();
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let bad = |line: usize, what: &str| Error::Unsupported(format!("bank line {line}: {what}"));
        match lines.next() {
            Some((_, "bank")) => {}
            Some((n, _)) => return Err(bad(n, "expected `bank`")),
            None => return Ok(bank),
        }
        let count = |line: usize, s: Option<&str>| -> Result<usize> {
            s.and_then(|t| t.parse().ok())
                .ok_or_else(|| bad(line, "expected a count"))
        };
        while let Some((n, head)) = lines.next() {
            let mut parts = head.split_whitespace();
            if parts.next() != Some("rays") {
                return Err(bad(n, "expected `rays`"));
            }
            let rows = count(n, parts.next())?;
            let dim = count(n, parts.next())?;
            let mut data = Vec::with_capacity(rows);
            for _ in 0..rows {
                let (n, l) = lines.next().ok_or_else(|| bad(n, "truncated rays"))?;
                let row: Vec<Rational> = l
                    .split_whitespace()
                    .map(|t| t.parse::<Rational>().map_err(|_| bad(n, "bad rational")))
                    .collect::<Result<_>>()?;
                if row.len() != dim {
                    return Err(bad(n, "wrong row length"));
                }
                data.push(row);
            }
            let rays = RationalMatrix::from_rows(dim, data);
            let (n, l) = lines.next().ok_or_else(|| bad(n, "missing group"))?;
            let k = count(n, l.strip_prefix("group ").map(str::trim))?;
            let mut gens = Vec::with_capacity(k);
            for _ in 0..k {
                let (n, l) = lines.next().ok_or_else(|| bad(n, "truncated group"))?;
                gens.push(Permutation::parse(l, rows).map_err(|e| bad(n, &e.to_string()))?);
            }
            let group = PermGroup::new(rows, gens)?;
            let (n, l) = lines.next().ok_or_else(|| bad(n, "missing facets"))?;
            let m = count(n, l.strip_prefix("facets ").map(str::trim))?;
            let mut reps = Vec::with_capacity(m);
            for _ in 0..m {
                let (n, l) = lines.next().ok_or_else(|| bad(n, "truncated facets"))?;
                let inner = l
                    .strip_prefix('{')
                    .and_then(|t| t.strip_suffix('}'))
                    .ok_or_else(|| bad(n, "expected a braced index list"))?;
                let idx: Vec<usize> = inner
                    .split_whitespace()
                    .map(|t| match t.parse::<usize>() {
                        Ok(i) if (1..=rows).contains(&i) => Ok(i - 1),
                        _ => Err(bad(n, "bad index")),
                    })
                    .collect::<Result<_>>()?;
                reps.push(FaceSet::new(idx));
            }
            bank.push(BankEntry {
                rays,
                group,
                facet_orbit_reps: reps,
            })?;
        }
        Ok(bank)
    }
}
