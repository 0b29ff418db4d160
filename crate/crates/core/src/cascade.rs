//! Symmetric Fourier–Motzkin elimination starting from a simplicial lift.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::conemodel::{facet_through, gift_wrap, ridges_of, Cone, Facet};
use crate::decomp::{Conversion, ConversionTask};
use crate::error::{Error, Result};
use crate::exactlin::{primitive_int, rank, Rational, RationalMatrix};
use crate::faceset::FaceSet;
use crate::orbits::OrbitDatabase;
use crate::permgrp::PermGroup;

/// Order of the rays used by the lift: the first `d` entries form a basis,
/// the remaining ones are lifted, in elimination order reversed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftOrder(pub Vec<usize>);

impl LiftOrder {
    /// Checks that `order` is a permutation whose first `d` rays are
    /// independent.
    pub fn new(c: &Cone, order: Vec<usize>) -> Result<Self> {
        let n = c.num_rays();
        let mut seen = vec![false; n];
        for &i in &order {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidPermutation(format!(
                    "ray {} repeated in lift order",
                    i + 1
                )));
            }
        }
        if order.len() != n {
            return Err(Error::InvalidPermutation(
                "lift order must list every ray".into(),
            ));
        }
        let d = c.dim();
        if rank(&c.rays().select_rows(&order[..d])) != d {
            return Err(Error::InvalidBasis(
                "first rays of the lift order are dependent".into(),
            ));
        }
        Ok(Self(order))
    }

    /// Greedy order: repeatedly lift the ray that keeps the set stabilizer
    /// of the lifted rays largest, never lifting a ray needed for a basis.
    pub fn greedy(c: &Cone, group: &PermGroup) -> Result<Self> {
        let n = c.num_rays();
        let d = c.dim();
        if rank(c.rays()) != d {
            return Err(Error::NotFullDimensional {
                rank: rank(c.rays()),
                dim: d,
            });
        }
        let mut lifted: Vec<usize> = Vec::new();
        let mut rest: Vec<usize> = (0..n).collect();
        while rest.len() > d {
            let mut best: Option<(num_bigint::BigUint, usize)> = None;
            for &r in &rest {
                let remaining: Vec<usize> = rest.iter().copied().filter(|&x| x != r).collect();
                if rank(&c.rays().select_rows(&remaining)) != d {
                    continue;
                }
                let mut set = lifted.clone();
                set.push(r);
                let order = group.set_stabilizer(&FaceSet::new(set)).order();
                if best.as_ref().map_or(true, |(o, _)| order > *o) {
                    best = Some((order, r));
                }
            }
            let (_, r) = best.expect("a non-coloop ray exists while more than d remain");
            lifted.push(r);
            rest.retain(|&x| x != r);
        }
        rest.extend(lifted);
        Ok(Self(rest))
    }
}

/// Facet orbits of the projection `p_i` of the lifted cone.
#[derive(Clone, Debug)]
pub struct CascadeState {
    /// Number of coordinates kept; runs from `n` down to `d`.
    pub step: usize,
    pub order: LiftOrder,
    /// Set stabilizer of the rays still lifted.
    pub group: PermGroup,
    pub cone: Cone,
    /// One facet per orbit under `group`.
    pub facets: Vec<Facet>,
}

/// Rays of `p_i` of the lift: original coordinates followed by one unit
/// coordinate for each of `order[d..i]`.
fn projected_cone(c: &Cone, order: &LiftOrder, i: usize) -> Result<Cone> {
    let d = c.dim();
    let mut slot = vec![usize::MAX; c.num_rays()];
    for (k, &r) in order.0[d..i].iter().enumerate() {
        slot[r] = k;
    }
    let rows = (0..c.num_rays())
        .map(|r| {
            let mut row = c.rays().row(r).to_vec();
            row.resize(i, Rational::zero());
            if slot[r] != usize::MAX {
                row[d + slot[r]] = Rational::from_integer(1.into());
            }
            row
        })
        .collect();
    Cone::new(RationalMatrix::from_rows(i, rows))
}

fn lifted_group(g: &PermGroup, order: &LiftOrder, d: usize, i: usize) -> PermGroup {
    if i == d {
        return g.clone();
    }
    g.set_stabilizer(&FaceSet::new(order.0[d..i].to_vec()))
}

/// The simplicial lift into `R^n`.
pub fn simplicial_lift(c: &Cone, order: &LiftOrder) -> Result<Cone> {
    projected_cone(c, order, c.num_rays())
}

/// Initial state: every ray complement is a facet of the simplicial lift.
pub fn initial_state(c: &Cone, group: &PermGroup, order: LiftOrder) -> Result<CascadeState> {
    let n = c.num_rays();
    let cone = simplicial_lift(c, &order)?;
    let g = lifted_group(group, &order, c.dim(), n);
    let facets = g
        .point_orbits()
        .iter()
        .map(|o| {
            let s = FaceSet::new((0..n).filter(|&x| x != o[0]).collect());
            facet_through(&cone, &s)
                .ok_or_else(|| Error::InvalidBasis("lift is not simplicial".into()))
        })
        .collect::<Result<_>>()?;
    Ok(CascadeState {
        step: n,
        order,
        group: g,
        cone,
        facets,
    })
}

/// Eliminates the last lifted coordinate. Facets with a zero coefficient
/// survive; each facet with a positive coefficient is combined with every
/// adjacent facet with a negative one. Orbits are handled under the common
/// subgroup of the two stabilizers and fused into the next one.
pub fn project_step(
    c: &Cone,
    task_group: &PermGroup,
    state: &CascadeState,
) -> Result<CascadeState> {
    let d = c.dim();
    let i = state.step;
    if i <= d {
        return Err(Error::Unsupported(
            "cascade already reached the original cone".into(),
        ));
    }
    let last = i - 1;
    let eliminated = state.order.0[last];
    let common = state.group.point_stabilizer(eliminated);
    let next_group = lifted_group(task_group, &state.order, d, i - 1);
    let next_cone = projected_cone(c, &state.order, i - 1)?;
    let db = OrbitDatabase::new(next_group.clone()).with_rays(next_cone.rays().clone());
    let truncate = |v: &[BigInt]| primitive_int(v[..last].to_vec());
    for rep in &state.facets {
        for piece in state.group.double_coset_split(&common, &rep.support)? {
            let f = facet_through(&state.cone, &piece).expect("image of a facet is a facet");
            let lead = &f.normal[last];
            if lead.is_zero() {
                db.insert_if_new(&next_cone.facet_from_normal(truncate(&f.normal)).support);
                continue;
            }
            if lead.is_negative() {
                continue;
            }
            let stab = common.set_stabilizer(&f.support);
            let mut ridges: Vec<FaceSet> = ridges_of(&state.cone, &f)?
                .iter()
                .map(|r| stab.canonical_representative(r))
                .collect();
            ridges.sort();
            ridges.dedup();
            for ridge in ridges {
                let h = gift_wrap(&state.cone, &f, &ridge)?;
                let neg = &h.normal[last];
                if !neg.is_negative() {
                    continue;
                }
                let combined: Vec<BigInt> = f
                    .normal
                    .iter()
                    .zip(&h.normal)
                    .map(|(a, b)| a * (-neg) + b * lead)
                    .collect();
                db.insert_if_new(&next_cone.facet_from_normal(truncate(&combined)).support);
            }
        }
    }
    let mut reps = db.representatives();
    reps.sort();
    let facets = reps
        .iter()
        .map(|s| facet_through(&next_cone, s).expect("stored support is a facet"))
        .collect();
    Ok(CascadeState {
        step: i - 1,
        order: state.order.clone(),
        group: next_group,
        cone: next_cone,
        facets,
    })
}

/// Runs all projection steps. Needs a group of restricted automorphisms,
/// since only those act linearly on every projection of the lift.
pub fn cascade_convert(task: &ConversionTask) -> Result<Conversion> {
    if !task.restricted {
        return Err(Error::Unsupported(
            "the cascade method needs a group of restricted automorphisms".into(),
        ));
    }
    let c = &task.cone;
    let order = match &task.policy.cascade_order {
        Some(o) => LiftOrder::new(c, o.clone())?,
        None => LiftOrder::greedy(c, &task.group)?,
    };
    let mut state = initial_state(c, &task.group, order)?;
    while state.step > c.dim() {
        state = project_step(c, &task.group, &state)?;
    }
    crate::decomp::fuse_facets(task, &state.facets)
}

#[cfg(test)]
mod tests;
