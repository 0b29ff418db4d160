//! Facet enumeration up to symmetry by decomposition into subproblems.

mod bank;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::conemodel::{dual_description_dd, facet_through, gift_wrap, Cone, FaceSet, Facet};
use crate::error::{Error, Result};
use crate::exactlin::{
    is_redundant_generator, kernel_basis, lp_solve, primitive_integer, rank, LinearConstraint,
    LpProblem, LpStatus, Rational, RationalMatrix,
};
use crate::orbits::{OrbitDatabase, Status};
use crate::permgrp::PermGroup;
use crate::pivotsym::PerturbationSpec;
use crate::symdetect::{build_colored_graph, restricted_automorphism_group};

pub use bank::{Bank, BankEntry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Direct,
    Incidence,
    Adjacency,
    Cascade,
    Pivot,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Direct,
        Method::Incidence,
        Method::Adjacency,
        Method::Cascade,
        Method::Pivot,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Incidence => "incidence",
            Method::Adjacency => "adjacency",
            Method::Cascade => "cascade",
            Method::Pivot => "pivot",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Unsupported(format!("unknown method `{s}`")))
    }
}

/// Knobs controlling recursion, pruning and parallelism.
#[derive(Clone, Debug)]
pub struct Policy {
    /// Deepest subproblem level that may still decompose further.
    pub max_depth: usize,
    /// Subproblems with at most this many rays are solved directly.
    pub base_threshold: usize,
    /// Subproblems in at most this dimension are solved directly.
    pub base_dim: usize,
    /// Process open orbits by ascending incidence number.
    pub incidence_ordering: bool,
    pub balinski: bool,
    /// Method override per depth; depth 0 is the top level.
    pub depth_methods: Vec<Method>,
    pub threads: usize,
    pub bank: Option<Arc<Bank>>,
    /// Adjacency-decomposition pruning inside the basis graph search.
    pub pivot_pruning: bool,
    pub perturbation: Option<PerturbationSpec>,
    /// Explicit lift order for the Cascade method.
    pub cascade_order: Option<Vec<usize>>,
}

impl Default for Policy {
    fn default() -> Self {
        Self {
            max_depth: 8,
            base_threshold: 25,
            base_dim: 4,
            incidence_ordering: true,
            balinski: true,
            depth_methods: Vec::new(),
            threads: 1,
            bank: None,
            pivot_pruning: true,
            perturbation: None,
            cascade_order: None,
        }
    }
}

/// A pointed full-dimensional cone and a group acting on its rays.
#[derive(Clone, Debug)]
pub struct ConversionTask {
    pub cone: Cone,
    pub group: PermGroup,
    pub method: Method,
    pub policy: Policy,
    /// The group is known to consist of restricted automorphisms.
    pub restricted: bool,
}

impl ConversionTask {
    pub fn new(cone: Cone, group: PermGroup, method: Method) -> Self {
        Self {
            cone,
            group,
            method,
            policy: Policy::default(),
            restricted: true,
        }
    }

    /// Task under the restricted automorphism group of the rays.
    pub fn with_detected_group(cone: Cone, method: Method) -> Result<Self> {
        let group = restricted_automorphism_group(cone.rays())?.group;
        Ok(Self::new(cone, group, method))
    }

    pub fn with_policy(mut self, policy: Policy) -> Self {
        self.policy = policy;
        self
    }

    /// Checks that every generator permutes the rays by a linear map.
    pub fn verify_group(&self) -> Result<()> {
        if self.group.degree() != self.cone.num_rays() {
            return Err(Error::GroupAction(format!(
                "group acts on {} points but the cone has {} rays",
                self.group.degree(),
                self.cone.num_rays()
            )));
        }
        let rays = self.cone.rays();
        for g in self.group.generators() {
            if crate::symdetect::linear_witness(rays, rays, g).is_none() {
                return Err(Error::GroupAction(format!(
                    "{g} is not a restricted automorphism"
                )));
            }
        }
        Ok(())
    }

    /// Orbit database for faces of this cone under the task group.
    pub fn face_database(&self) -> OrbitDatabase {
        let db = OrbitDatabase::new(self.group.clone()).with_rays(self.cone.rays().clone());
        if self.restricted {
            if let Ok(g) = build_colored_graph(self.cone.rays()) {
                return db.with_metric(g);
            }
        }
        db
    }

    fn subtask(&self, cone: Cone, group: PermGroup) -> ConversionTask {
        ConversionTask {
            cone,
            group,
            method: self.method,
            policy: self.policy.clone(),
            restricted: self.restricted,
        }
    }
}

#[derive(Debug, Default)]
pub struct Stats {
    pub subproblems: AtomicUsize,
    pub bank_hits: AtomicUsize,
    pub balinski_skips: AtomicUsize,
}

impl Stats {
    fn bump(counter: &AtomicUsize) {
        counter.fetch_add(1, Ordering::Relaxed);
    }
}

/// Facet orbit representatives, sorted by support; each support is the
/// canonical representative of its orbit.
#[derive(Clone, Debug)]
pub struct Conversion {
    pub representatives: Vec<Facet>,
    /// Number of basis orbits visited, for the pivoting method.
    pub basis_orbits: Option<usize>,
}

impl Conversion {
    pub fn supports(&self) -> Vec<FaceSet> {
        self.representatives
            .iter()
            .map(|f| f.support.clone())
            .collect()
    }
}

/// Total number of facets: the sum of orbit sizes.
pub fn total_facets(group: &PermGroup, reps: &[Facet]) -> BigUint {
    reps.iter().map(|f| group.orbit_size(&f.support)).sum()
}

/// Runs a task from the top level.
pub fn convert(task: &ConversionTask) -> Result<Conversion> {
    let stats = Stats::default();
    convert_with_stats(task, &stats)
}

pub fn convert_with_stats(task: &ConversionTask, stats: &Stats) -> Result<Conversion> {
    let c = &task.cone;
    if c.rank() != c.dim() {
        return Err(Error::NotFullDimensional {
            rank: c.rank(),
            dim: c.dim(),
        });
    }
    if task.group.degree() != c.num_rays() {
        return Err(Error::GroupAction(format!(
            "group degree {} differs from ray count {}",
            task.group.degree(),
            c.num_rays()
        )));
    }
    recursive_convert(task, 0, stats)
}

fn is_base_case(task: &ConversionTask) -> bool {
    let c = &task.cone;
    c.dim() <= 2 || c.num_rays() <= task.policy.base_threshold || c.dim() <= task.policy.base_dim
}

fn method_at(task: &ConversionTask, depth: usize) -> Method {
    task.policy
        .depth_methods
        .get(depth)
        .copied()
        .unwrap_or(task.method)
}

/// Dispatches a (sub)problem: direct solving below the base case, the bank
/// for known subcones, otherwise the configured method.
pub fn recursive_convert(task: &ConversionTask, depth: usize, stats: &Stats) -> Result<Conversion> {
    if depth > 0 && is_base_case(task) {
        return direct(task);
    }
    if depth > task.policy.max_depth {
        return Err(Error::RecursionDepth {
            depth,
            rays: task.cone.num_rays(),
            dim: task.cone.dim(),
        });
    }
    let banked = depth > 0 && task.restricted;
    if banked {
        if let Some(bank) = &task.policy.bank {
            if let Some(reps) = bank.lookup(&task.cone, &task.group)? {
                Stats::bump(&stats.bank_hits);
                return finish(task, reps.iter().cloned(), None);
            }
        }
    }
    let result = match method_at(task, depth) {
        Method::Direct => direct(task)?,
        Method::Incidence => incidence_decomposition(task, depth, stats)?,
        Method::Adjacency => adjacency_decomposition(task, depth, stats)?,
        Method::Cascade => crate::cascade::cascade_convert(task)?,
        Method::Pivot => {
            let spec = if depth == 0 {
                task.policy.perturbation.as_ref()
            } else {
                None
            };
            let out = crate::pivotsym::explore_basis_graph(task, spec)?;
            Conversion {
                representatives: out.facets,
                basis_orbits: Some(out.basis_orbits),
            }
        }
    };
    if banked {
        if let Some(bank) = &task.policy.bank {
            bank.store(&task.cone, &task.group, &result.supports())?;
        }
    }
    Ok(result)
}

/// Sorts canonical facet supports under the task group into a result.
fn finish(
    task: &ConversionTask,
    supports: impl IntoIterator<Item = FaceSet>,
    basis: Option<usize>,
) -> Result<Conversion> {
    let mut reps: Vec<FaceSet> = supports
        .into_iter()
        .map(|s| task.group.canonical_representative(&s))
        .collect();
    reps.sort();
    reps.dedup();
    let representatives = reps
        .into_iter()
        .map(|s| {
            facet_through(&task.cone, &s).ok_or_else(|| {
                Error::GroupAction(format!("the image {s:?} of a facet is not a facet"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Conversion {
        representatives,
        basis_orbits: basis,
    })
}

/// Fuses an arbitrary facet list into orbit representatives.
pub fn fuse_facets(task: &ConversionTask, facets: &[Facet]) -> Result<Conversion> {
    let db = task.face_database();
    for f in facets {
        db.insert_if_new(&f.support);
    }
    finish(task, db.representatives(), None)
}

pub fn direct(task: &ConversionTask) -> Result<Conversion> {
    let facets = dual_description_dd(&task.cone)?;
    fuse_facets(task, &facets)
}

/// The cone of directions at ray `r`: all other rays projected along `v_r`,
/// keeping only those spanning edges through `r`. Returns the quotient cone
/// and the original indices of its rays.
pub fn quotient_at(c: &Cone, r: usize) -> Result<(Cone, Vec<usize>)> {
    let vr = c.rays().row(r).to_vec();
    let k = vr
        .iter()
        .position(|x| !x.is_zero())
        .ok_or(Error::DegenerateCone(0))?;
    let others: Vec<usize> = (0..c.num_rays()).filter(|&i| i != r).collect();
    let rows: Vec<Vec<Rational>> = others
        .iter()
        .map(|&i| {
            let v = c.rays().row(i);
            let t = &v[k] / &vr[k];
            (0..c.dim())
                .filter(|&j| j != k)
                .map(|j| &v[j] - &t * &vr[j])
                .collect()
        })
        .collect();
    let w = RationalMatrix::from_rows(c.dim() - 1, rows);
    let mut keep = Vec::new();
    for (pos, &i) in others.iter().enumerate() {
        let zero = w.row(pos).iter().all(|x| x.is_zero());
        if !zero && !is_redundant_generator(&w, pos, &[])? {
            keep.push((pos, i));
        }
    }
    let positions: Vec<usize> = keep.iter().map(|&(p, _)| p).collect();
    let cone = Cone::new(w.select_rows(&positions))?;
    Ok((cone, keep.into_iter().map(|(_, i)| i).collect()))
}

fn run_parallel<T: Send, R: Send>(
    threads: usize,
    items: Vec<T>,
    f: impl Fn(T) -> Result<R> + Sync + Send,
) -> Result<Vec<R>> {
    if threads <= 1 || items.len() <= 1 {
        return items.into_iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
    pool.install(|| items.into_par_iter().map(f).collect())
}

/// Facets through each ray-orbit representative, fused under the group.
pub fn incidence_decomposition(
    task: &ConversionTask,
    depth: usize,
    stats: &Stats,
) -> Result<Conversion> {
    let c = &task.cone;
    let db = task.face_database();
    let reps: Vec<usize> = task.group.point_orbits().iter().map(|o| o[0]).collect();
    let found = run_parallel(task.policy.threads, reps, |r| -> Result<Vec<FaceSet>> {
        let (quotient, kept) = quotient_at(c, r)?;
        let stab = task.group.point_stabilizer(r).induced_on(&kept)?;
        let sub = task.subtask(quotient, stab);
        Stats::bump(&stats.subproblems);
        let local = recursive_convert(&sub, depth + 1, stats)?;
        let mut out = Vec::new();
        for f in &local.representatives {
            let mut s = f.support.map_through(&kept).into_indices();
            s.push(r);
            let s = FaceSet::new(s);
            let facet = facet_through(c, &s).ok_or_else(|| {
                Error::Unsupported(format!("lifted set {s:?} does not span a facet"))
            })?;
            out.push(facet.support);
        }
        Ok(out)
    })?;
    for list in found {
        for s in list {
            db.insert_if_new(&s);
        }
    }
    finish(task, db.representatives(), None)
}

/// A facet found deterministically: an LP yields a strictly positive
/// functional, which is then rotated until it vanishes on a rank `d-1` set.
pub fn initial_facet(c: &Cone) -> Result<Facet> {
    let d = c.dim();
    let constraints = c
        .rays()
        .row_iter()
        .map(|r| LinearConstraint::nonneg(r.to_vec(), -Rational::one()))
        .collect();
    let res = lp_solve(&LpProblem {
        objective: vec![Rational::zero(); d],
        constraints,
    })?;
    if res.status == LpStatus::Infeasible {
        return Err(Error::Unsupported("cone is not pointed".into()));
    }
    let mut f = res.point.expect("feasible problem has a point");
    let center: Vec<Rational> = (0..d)
        .map(|j| (0..c.num_rays()).map(|i| c.rays()[(i, j)].clone()).sum())
        .collect();
    loop {
        let vals: Vec<Rational> = c
            .rays()
            .row_iter()
            .map(|v| crate::exactlin::dot(&f, v))
            .collect();
        let tight: Vec<usize> = (0..c.num_rays()).filter(|&i| vals[i].is_zero()).collect();
        if rank(&c.rays().select_rows(&tight)) + 1 >= d {
            let normal = primitive_integer(&f);
            return Ok(c.facet_from_normal(normal));
        }
        let mut m = c.rays().select_rows(&tight);
        m.push_row(&center);
        let k = kernel_basis(&m);
        let g = k.row(0).to_vec();
        let mut best: Option<Rational> = None;
        for (i, v) in c.rays().row_iter().enumerate() {
            let gv = crate::exactlin::dot(&g, v);
            if gv.is_positive() {
                let t = &vals[i] / &gv;
                if best.as_ref().map_or(true, |b| t < *b) {
                    best = Some(t);
                }
            }
        }
        let t = best.expect("a functional vanishing on the center is positive somewhere");
        f = f.iter().zip(&g).map(|(a, b)| a - &t * b).collect();
    }
}

/// True when the open orbits are too few for an undiscovered facet to be
/// separated from the closed ones in the facet graph. Only meaningful once
/// some orbit is closed.
pub fn balinski_skip(open: &[(FaceSet, BigUint)], d: usize) -> bool {
    let total: BigUint = open.iter().map(|(_, s)| s.clone()).sum();
    total < BigUint::from(d.saturating_sub(1))
}

/// Stable sort by ascending number of incident rays.
pub fn order_by_incidence_number(mut faces: Vec<FaceSet>) -> Vec<FaceSet> {
    faces.sort_by_key(FaceSet::len);
    faces
}

/// Ridge orbit representatives of facet `f` under `Stab(G, f)`, as subsets
/// of the parent's rays. The facet cone is solved under the group generated
/// by the stabilizer and its own restricted automorphisms, then split.
pub fn ridge_representatives(
    task: &ConversionTask,
    f: &FaceSet,
    stabilizer: &PermGroup,
    depth: usize,
    stats: &Stats,
) -> Result<Vec<FaceSet>> {
    let face = task.cone.face_cone(f)?;
    let stab_local = stabilizer.induced_on(f.indices())?;
    let own = if task.restricted || stab_local.is_trivial() {
        restricted_automorphism_group(face.rays())?.group
    } else {
        PermGroup::trivial(f.len())
    };
    let big = stab_local.join(&own)?;
    let sub = task.subtask(face, big.clone());
    Stats::bump(&stats.subproblems);
    let local = recursive_convert(&sub, depth + 1, stats)?;
    let mut out = Vec::new();
    for r in &local.representatives {
        for piece in big.double_coset_split(&stab_local, &r.support)? {
            out.push(piece.map_through(f.indices()));
        }
    }
    Ok(out)
}

/// Traverses the facet graph orbit by orbit from an initial facet.
pub fn adjacency_decomposition(
    task: &ConversionTask,
    depth: usize,
    stats: &Stats,
) -> Result<Conversion> {
    let c = &task.cone;
    let d = c.dim();
    let db = task.face_database();
    db.insert_if_new(&initial_facet(c)?.support);
    loop {
        let open = db.open_indices();
        if open.is_empty() {
            break;
        }
        if task.policy.balinski && open.len() < db.len() {
            let sizes: Vec<(FaceSet, BigUint)> = open
                .iter()
                .map(|&k| {
                    let e = db.entry(k);
                    (e.representative, e.orbit_size)
                })
                .collect();
            if balinski_skip(&sizes, d) {
                for &k in &open {
                    db.set_status(k, Status::Closed);
                    Stats::bump(&stats.balinski_skips);
                }
                break;
            }
        }
        let batch: Vec<usize> = if task.policy.threads > 1 {
            open
        } else if task.policy.incidence_ordering {
            let mut o = open;
            o.sort_by_key(|&k| (db.entry(k).representative.len(), k));
            vec![o[0]]
        } else {
            vec![open[0]]
        };
        let work: Vec<(usize, FaceSet, PermGroup)> = batch
            .iter()
            .map(|&k| {
                let e = db.entry(k);
                (k, e.representative, e.stabilizer)
            })
            .collect();
        run_parallel(task.policy.threads, work, |(k, rep, stab)| -> Result<()> {
            let facet = facet_through(c, &rep).expect("stored orbit is a facet");
            for ridge in ridge_representatives(task, &rep, &stab, depth, stats)? {
                let next = gift_wrap(c, &facet, &ridge)?;
                db.insert_if_new(&next.support);
            }
            db.set_status(k, Status::Closed);
            Ok(())
        })?;
    }
    finish(task, db.representatives(), None)
}

#[cfg(test)]
mod tests;
