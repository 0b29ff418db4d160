//! Basis-graph exploration up to symmetry with orbitwise lexicographic
//! perturbation.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conemodel::{boundary_complex_refines, dual_description_dd, facet_through, Cone, Facet};
use crate::decomp::{fuse_facets, initial_facet, ConversionTask};
use crate::error::{Error, Result};
use crate::exactlin::{dot, rank, Rational, RationalMatrix};
use crate::faceset::FaceSet;
use crate::orbits::OrbitDatabase;
use crate::permgrp::{PermGroup, Permutation};
use crate::symdetect::{build_colored_graph, linear_witness};

/// Which generator orbits are pushed or pulled, and in which order.
#[derive(Clone, Debug)]
pub struct PerturbationSpec {
    pub subgroup: PermGroup,
    /// Orbits of the subgroup, ordered by smallest element.
    pub orbits: Vec<Vec<usize>>,
    /// `order[p]` is the orbit perturbed by `eps_(p+1)`.
    pub order: Vec<usize>,
    /// `+1` pushes, `-1` pulls; indexed by orbit.
    pub signs: Vec<i8>,
}

impl PerturbationSpec {
    pub fn new(subgroup: PermGroup, order: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let orbits = subgroup.point_orbits();
        let k = orbits.len();
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted != (0..k).collect::<Vec<_>>() {
            return Err(Error::Perturbation(format!(
                "perturbation order must be a permutation of the {k} orbits"
            )));
        }
        if signs.len() != k || signs.iter().any(|s| s.abs() != 1) {
            return Err(Error::Perturbation("one sign of +1 or -1 per orbit".into()));
        }
        Ok(Self {
            subgroup,
            orbits,
            order,
            signs,
        })
    }

    /// Pull every orbit, ordered by smallest member.
    pub fn pull_all(subgroup: PermGroup) -> Self {
        let k = subgroup.point_orbits().len();
        Self::new(subgroup, (0..k).collect(), vec![-1; k]).unwrap()
    }

    /// Pull every orbit, ordered by an orbit key (ties by smallest member).
    pub fn pull_ordered_by<K: Ord>(subgroup: PermGroup, key: impl Fn(&[usize]) -> K) -> Self {
        let orbits = subgroup.point_orbits();
        let mut order: Vec<usize> = (0..orbits.len()).collect();
        order.sort_by_key(|&j| key(&orbits[j]));
        let k = orbits.len();
        Self::new(subgroup, order, vec![-1; k]).unwrap()
    }

    /// Perturbing a single orbit does not reduce degeneracy.
    pub fn is_vacuous(&self) -> bool {
        self.orbits.len() < 2
    }

    fn orbit_label(&self) -> Vec<usize> {
        let mut label = vec![0; self.subgroup.degree()];
        for (j, o) in self.orbits.iter().enumerate() {
            for &p in o {
                label[p] = j;
            }
        }
        label
    }
}

/// Right-hand side `base + N (eps_1 .. eps_k)` of the perturbed polar
/// system `V x >= -(u + mu)`, read lexicographically.
#[derive(Clone, Debug)]
pub struct SymbolicRHS {
    /// `-u`, with `u_i = phi(v_i)` for the functional `phi = c / |c|^2`
    /// dual to the fixed point `c`.
    pub base: Vec<Rational>,
    /// One column per orbit in perturbation order.
    pub eps: RationalMatrix,
    pub vacuous: bool,
}

/// Sum of all rays: fixed by every restricted automorphism and interior.
pub fn fixed_point(c: &Cone) -> Vec<Rational> {
    (0..c.dim())
        .map(|j| c.rays().row_iter().map(|r| r[j].clone()).sum())
        .collect()
}

pub fn build_perturbation(c: &Cone, spec: &PerturbationSpec) -> Result<SymbolicRHS> {
    let n = c.num_rays();
    if spec.subgroup.degree() != n {
        return Err(Error::Perturbation(format!(
            "subgroup acts on {} points, cone has {n} rays",
            spec.subgroup.degree()
        )));
    }
    for g in spec.subgroup.generators() {
        if linear_witness(c.rays(), c.rays(), g).is_none() {
            return Err(Error::NotASubgroup(g.to_string()));
        }
    }
    let center = fixed_point(c);
    let norm = dot(&center, &center);
    let base = c
        .rays()
        .row_iter()
        .map(|v| -(dot(v, &center) / &norm))
        .collect();
    let label = spec.orbit_label();
    let k = spec.orbits.len();
    let mut eps = RationalMatrix::zeros(n, k);
    for (p, &j) in spec.order.iter().enumerate() {
        for &i in &spec.orbits[j] {
            eps[(i, p)] = Rational::from_integer((-spec.signs[label[i]]).into());
        }
    }
    Ok(SymbolicRHS {
        base,
        eps,
        vacuous: spec.is_vacuous(),
    })
}

/// Lexicographic value `x[0] + x[1] eps_1 + ...`.
type Sym = Vec<Rational>;

fn lex_cmp(a: &[Rational], b: &[Rational]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn lex_sign(a: &[Rational]) -> Ordering {
    a.iter()
        .find(|x| !x.is_zero())
        .map_or(Ordering::Equal, |x| x.cmp(&Rational::zero()))
}

/// A (d-1)-basis with the facet of the unperturbed cone it spans.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisNode {
    pub indices: FaceSet,
    pub facet: Facet,
    /// Rays tight for the perturbed system: the facet of the perturbed cone.
    pub fine: FaceSet,
    pub explored: bool,
    pub known: bool,
}

/// Dictionary of one basis: the inverse of `[v_beta; c]` and all slacks.
struct Dict {
    inverse: RationalMatrix,
    slacks: Vec<Sym>,
}

/// Pivoting engine on `f(v_k) + mu_k >= 0`, `f(c) = 1`.
pub struct BasisGraph<'a> {
    cone: &'a Cone,
    center: Vec<Rational>,
    /// `mu_k` as coefficients of `eps_1 .. eps_k`.
    mu: Vec<Vec<Rational>>,
}

impl<'a> BasisGraph<'a> {
    pub fn new(cone: &'a Cone, rhs: Option<&SymbolicRHS>) -> Self {
        let mu = match rhs {
            Some(r) => (0..cone.num_rays())
                .map(|k| r.eps.row(k).iter().map(|x| -x).collect())
                .collect(),
            None => vec![Vec::new(); cone.num_rays()],
        };
        Self {
            cone,
            center: fixed_point(cone),
            mu,
        }
    }

    fn width(&self) -> usize {
        1 + self.mu.first().map_or(0, Vec::len)
    }

    fn dict(&self, beta: &FaceSet) -> Option<Dict> {
        let d = self.cone.dim();
        if beta.len() + 1 != d {
            return None;
        }
        let mut m = self.cone.rays().select_rows(beta.indices());
        m.push_row(&self.center);
        let inverse = m.inverse()?;
        let w = self.width();
        let mut rhs = RationalMatrix::zeros(d, w);
        for (t, k) in beta.iter().enumerate() {
            for (p, x) in self.mu[k].iter().enumerate() {
                rhs[(t, p + 1)] = -x;
            }
        }
        rhs[(d - 1, 0)] = Rational::one();
        let f = inverse.mul(&rhs);
        let slacks = (0..self.cone.num_rays())
            .map(|k| {
                let v = self.cone.rays().row(k);
                (0..w)
                    .map(|q| {
                        let mut s: Rational = (0..d).map(|j| &v[j] * &f[(j, q)]).sum();
                        if q > 0 {
                            s += &self.mu[k][q - 1];
                        }
                        s
                    })
                    .collect()
            })
            .collect();
        Some(Dict { inverse, slacks })
    }

    /// Whether `beta` is a lexicographically feasible basis.
    pub fn is_feasible(&self, beta: &FaceSet) -> bool {
        self.dict(beta)
            .is_some_and(|d| d.slacks.iter().all(|s| lex_sign(s) != Ordering::Less))
    }

    pub fn node(&self, beta: &FaceSet) -> Result<BasisNode> {
        let dict = self
            .dict(beta)
            .ok_or_else(|| Error::InvalidBasis(format!("{beta:?} is not a basis")))?;
        let fine = (0..self.cone.num_rays())
            .filter(|&k| dict.slacks[k].iter().all(Zero::is_zero))
            .collect();
        let coarse: FaceSet = (0..self.cone.num_rays())
            .filter(|&k| dict.slacks[k][0].is_zero())
            .collect();
        let facet = facet_through(self.cone, &coarse)
            .ok_or_else(|| Error::InvalidBasis(format!("{beta:?} does not span a facet")))?;
        Ok(BasisNode {
            indices: beta.clone(),
            facet,
            fine,
            explored: false,
            known: false,
        })
    }

    /// Every basis reached from `beta` by removing `leaving` under the
    /// minimum ratio test, ties kept, in ascending order of the entering ray.
    pub fn neighbors(&self, beta: &FaceSet, leaving: usize) -> Result<Vec<FaceSet>> {
        let t = beta
            .indices()
            .iter()
            .position(|&x| x == leaving)
            .ok_or_else(|| {
                Error::InvalidBasis(format!("ray {} is not in the basis", leaving + 1))
            })?;
        let dict = self
            .dict(beta)
            .ok_or_else(|| Error::InvalidBasis(format!("{beta:?} is not a basis")))?;
        let d = self.cone.dim();
        let g: Vec<Rational> = (0..d).map(|j| dict.inverse[(j, t)].clone()).collect();
        let mut best: Option<Sym> = None;
        let mut ties: Vec<usize> = Vec::new();
        for k in 0..self.cone.num_rays() {
            let gk = dot(&g, self.cone.rays().row(k));
            if !gk.is_negative() {
                continue;
            }
            let scale = -gk;
            let ratio: Sym = dict.slacks[k].iter().map(|s| s / &scale).collect();
            match best.as_ref().map(|b| lex_cmp(&ratio, b)) {
                None | Some(Ordering::Less) => {
                    best = Some(ratio);
                    ties = vec![k];
                }
                Some(Ordering::Equal) => ties.push(k),
                Some(Ordering::Greater) => {}
            }
        }
        if ties.is_empty() {
            return Err(Error::InvalidBasis(
                "unbounded pivot in a pointed cone".into(),
            ));
        }
        Ok(ties
            .into_iter()
            .map(|k| {
                let mut idx: Vec<usize> = beta.iter().filter(|&x| x != leaving).collect();
                idx.push(k);
                FaceSet::new(idx)
            })
            .collect())
    }

    /// A lexicographically feasible basis inside the support of `f`, found
    /// by dual simplex steps with Bland's rule.
    pub fn start_basis(&self, f: &Facet) -> Result<FaceSet> {
        let rays = self.cone.rays();
        let support = f.support.indices();
        let local = rays.select_rows(support).independent_rows();
        let mut beta: Vec<usize> = local.iter().map(|&i| support[i]).collect();
        if beta.len() + 1 != self.cone.dim() {
            return Err(Error::InvalidBasis(
                "facet support has the wrong rank".into(),
            ));
        }
        let mut lambda = vec![Rational::one(); beta.len()];
        loop {
            let set = FaceSet::new(beta.clone());
            let dict = self.dict(&set).expect("basis of a facet hyperplane");
            let Some(&k) = support
                .iter()
                .find(|&&k| lex_sign(&dict.slacks[k]) == Ordering::Less)
            else {
                return Ok(set);
            };
            // coordinates of v_k in the basis, in the order of `set`
            let alpha_sorted = dict.inverse.transpose().mul_vec(rays.row(k));
            let pos = |b: usize| set.indices().iter().position(|&x| x == b).unwrap();
            let alpha: Vec<Rational> = beta.iter().map(|&b| alpha_sorted[pos(b)].clone()).collect();
            let mut leave: Option<(Rational, usize, usize)> = None;
            for (t, a) in alpha.iter().enumerate() {
                if !a.is_positive() {
                    continue;
                }
                let r = &lambda[t] / a;
                let better = match &leave {
                    None => true,
                    Some((br, bi, _)) => r < *br || (r == *br && beta[t] < *bi),
                };
                if better {
                    leave = Some((r, beta[t], t));
                }
            }
            let (r, _, t) = leave.ok_or_else(|| {
                Error::Perturbation("no lexicographically feasible basis in the facet".into())
            })?;
            for (j, l) in lambda.iter_mut().enumerate() {
                if j != t {
                    *l -= &alpha[j] * &r;
                }
            }
            lambda[t] = r;
            beta[t] = k;
        }
    }
}

/// Single pivot with ties among entering rays broken by lowest index.
pub fn pivot(
    c: &Cone,
    b: &BasisNode,
    leaving: usize,
    perturb: Option<&SymbolicRHS>,
) -> Result<BasisNode> {
    let graph = BasisGraph::new(c, perturb);
    let next = graph.neighbors(&b.indices, leaving)?;
    graph.node(&next[0])
}

/// Facet orbits already seen, with the first-discovered member of each.
pub struct PruningState {
    db: OrbitDatabase,
    first: HashMap<usize, FaceSet>,
}

impl PruningState {
    pub fn new(db: OrbitDatabase) -> Self {
        Self {
            db,
            first: HashMap::new(),
        }
    }
}

/// Whether the neighbours of a basis spanning `facet` must be explored:
/// false exactly when the orbit of `facet` is known through a different
/// first-discovered member.
pub fn adjacency_pruning_filter(state: &mut PruningState, facet: &FaceSet) -> bool {
    let (_, _, k) = state.db.insert_if_new(facet);
    let first = state.first.entry(k).or_insert_with(|| facet.clone());
    first == facet
}

#[derive(Clone, Debug)]
pub struct Exploration {
    /// Facet orbits of the unperturbed cone under the task group.
    pub facets: Vec<Facet>,
    pub basis_orbits: usize,
    pub basis_representatives: Vec<FaceSet>,
    /// Facet orbits of the perturbed cone under the basis group.
    pub fine_facets: Vec<FaceSet>,
    /// Distinct bases taken off the search stack.
    pub visited: usize,
    pub visited_bases: Vec<FaceSet>,
    /// Bases first skipped by pruning and later explored from the queue of
    /// deferred ones.
    pub deferred_explored: usize,
}

/// Depth-first search of the (perturbed) basis graph up to symmetry.
pub fn explore_basis_graph(
    task: &ConversionTask,
    spec: Option<&PerturbationSpec>,
) -> Result<Exploration> {
    if !task.restricted {
        return Err(Error::Unsupported(
            "basis-graph exploration needs a group of restricted automorphisms".into(),
        ));
    }
    let c = &task.cone;
    let rhs = spec.map(|s| build_perturbation(c, s)).transpose()?;
    let group = spec.map_or(task.group.clone(), |s| s.subgroup.clone());
    let graph = BasisGraph::new(c, rhs.as_ref());
    let database = || {
        let db = OrbitDatabase::new(group.clone()).with_rays(c.rays().clone());
        match build_colored_graph(c.rays()) {
            Ok(g) => db.with_metric(g),
            Err(_) => db,
        }
    };
    let bases = database();
    let mut pruning = PruningState::new(database());
    let fine = database();
    let coarse = task.face_database();

    let start = graph.start_basis(&initial_facet(c)?)?;
    let mut stack = vec![start];
    let mut visited: HashSet<FaceSet> = HashSet::new();
    let mut deferred: Vec<FaceSet> = Vec::new();
    let mut forced: HashSet<FaceSet> = HashSet::new();
    let mut deferred_explored = 0;
    loop {
        while let Some(b) = stack.pop() {
            if !visited.insert(b.clone()) && !forced.contains(&b) {
                continue;
            }
            if bases.find(&b).is_some() {
                continue;
            }
            let node = graph.node(&b)?;
            if task.policy.pivot_pruning
                && !forced.contains(&b)
                && !adjacency_pruning_filter(&mut pruning, &node.fine)
            {
                deferred.push(b);
                continue;
            }
            bases.insert_if_new(&b);
            fine.insert_if_new(&node.fine);
            coarse.insert_if_new(&node.facet.support);
            for leaving in b.iter() {
                for next in graph.neighbors(&b, leaving)? {
                    stack.push(next);
                }
            }
        }
        let Some(b) = deferred.drain(..).find(|b| bases.find(b).is_none()) else {
            break;
        };
        deferred_explored += 1;
        forced.insert(b.clone());
        stack.push(b);
    }
    let facets: Vec<Facet> = coarse
        .representatives()
        .iter()
        .map(|s| facet_through(c, s).expect("recorded support is a facet"))
        .collect();
    Ok(Exploration {
        facets: fuse_facets(task, &facets)?.representatives,
        basis_orbits: bases.len(),
        basis_representatives: bases.sorted_representatives(),
        fine_facets: fine.sorted_representatives(),
        visited: visited.len(),
        visited_bases: {
            let mut v: Vec<FaceSet> = visited.into_iter().collect();
            v.sort();
            v
        },
        deferred_explored,
    })
}

/// Checks both conditions of a valid perturbation by brute force: no new
/// linear dependence among subsets of size at most `d`, and facets of the
/// perturbed cone inside facets of the original. `bijection[i]` is the row
/// of `perturbed` corresponding to row `i` of `original`.
pub fn verify_valid_perturbation(
    original: &RationalMatrix,
    perturbed: &RationalMatrix,
    bijection: &[usize],
) -> Result<bool> {
    let n = original.rows();
    if perturbed.rows() != n || bijection.len() != n {
        return Ok(false);
    }
    let d = original.cols();
    let mut subset: Vec<usize> = Vec::new();
    fn walk(
        start: usize,
        n: usize,
        d: usize,
        subset: &mut Vec<usize>,
        check: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if !subset.is_empty() && !check(subset) {
            return false;
        }
        if subset.len() == d {
            return true;
        }
        for i in start..n {
            subset.push(i);
            let ok = walk(i + 1, n, d, subset, check);
            subset.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    let mut independent = |w: &[usize]| {
        let image: Vec<usize> = w.iter().map(|&i| bijection[i]).collect();
        rank(&perturbed.select_rows(&image)) == w.len() || rank(&original.select_rows(w)) < w.len()
    };
    if !walk(0, n, d, &mut subset, &mut independent) {
        return Ok(false);
    }
    let coarse = dual_description_dd(&Cone::new(original.clone())?)?;
    let fine = dual_description_dd(&Cone::new(perturbed.clone())?)?;
    Ok(boundary_complex_refines(&coarse, &fine, bijection))
}

/// Result of the linear ordering triangulation experiment on a cube.
#[derive(Clone, Debug)]
pub struct TriangulationReport {
    pub basis_orbits: usize,
    pub fine_facets: usize,
    pub refines: bool,
}

impl TriangulationReport {
    pub fn holds(&self, d: usize) -> bool {
        let factorial: usize = (1..=d).product();
        self.basis_orbits == 1 && self.fine_facets == 2 * factorial && self.refines
    }
}

/// Pulls the cube orbitwise under the stabilizer of the antipodal pair
/// `{-e, e}`, orbits taken by increasing `min(e.v, -e.v)`, and explores
/// the perturbed basis graph.
pub fn linear_ordering_triangulation(d: usize) -> Result<TriangulationReport> {
    if !(2..=4).contains(&d) {
        return Err(Error::Unsupported(
            "cube triangulation check runs for 2 <= d <= 4".into(),
        ));
    }
    let c = crate::corpus::cube(d);
    let task = ConversionTask::with_detected_group(c.clone(), crate::decomp::Method::Pivot)?;
    let top = (1usize << d) - 1;
    let h = task.group.set_stabilizer(&FaceSet::new(vec![0, top]));
    let omega = |v: usize| {
        let s = 2 * (v.count_ones() as i64) - d as i64;
        s.min(-s)
    };
    let spec = PerturbationSpec::pull_ordered_by(h.clone(), |o| (omega(o[0]), o[0]));
    let out = explore_basis_graph(&task, Some(&spec))?;
    let fine_total: usize = out
        .fine_facets
        .iter()
        .map(|s| usize::try_from(h.orbit_size(s)).unwrap_or(usize::MAX))
        .sum();
    let fine: Vec<Facet> = out
        .fine_facets
        .iter()
        .flat_map(|s| h.orbit_of_set(s))
        .map(|s| Facet {
            normal: Vec::new(),
            support: s,
        })
        .collect();
    let coarse = dual_description_dd(&c)?;
    let identity: Vec<usize> = (0..c.num_rays()).collect();
    Ok(TriangulationReport {
        basis_orbits: out.basis_orbits,
        fine_facets: fine_total,
        refines: boundary_complex_refines(&coarse, &fine, &identity),
    })
}

pub fn linear_ordering_triangulation_check(d: usize) -> Result<bool> {
    Ok(linear_ordering_triangulation(d)?.holds(d))
}

/// Stabilizer of each of the given ray sets.
pub fn stabilizer_subgroup(g: &PermGroup, sets: &[FaceSet]) -> PermGroup {
    sets.iter().fold(g.clone(), |h, s| h.set_stabilizer(s))
}

/// Random subgroup with exactly `orbits` ray orbits, generated by random
/// elements (random words in the generators); `None` after `attempts`.
pub fn random_subgroup_with_orbits(
    g: &PermGroup,
    orbits: usize,
    attempts: usize,
    seed: u64,
) -> Option<PermGroup> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens = g.generators();
    if gens.is_empty() {
        return (g.degree() == orbits).then(|| g.clone());
    }
    let random_element = |rng: &mut ChaCha8Rng| {
        let len = 8 * gens.len() + 8;
        (0..len).fold(Permutation::identity(g.degree()), |acc, _| {
            acc.then(gens.choose(rng).unwrap())
        })
    };
    for _ in 0..attempts {
        let count = rng.gen_range(1..=3);
        let picked: Vec<Permutation> = (0..count).map(|_| random_element(&mut rng)).collect();
        let h = PermGroup::new(g.degree(), picked).ok()?;
        if h.point_orbits().len() == orbits {
            return Some(h);
        }
    }
    None
}
