//! Polyhedral cones: homogenization, reduction to pointed full-dimensional
//! form, incidence, Double Description and gift wrapping.

mod dd;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactlin::{
    dot, int_dot, is_redundant_generator, kernel_basis, lp_solve, primitive_int, primitive_integer,
    to_rational, LinearConstraint, LpProblem, LpStatus, Rational, RationalMatrix,
};
pub use crate::faceset::FaceSet;

/// Records which input rows were vertices when a polyhedron was
/// homogenized; the extra coordinate is the last one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homogenization {
    pub is_point: Vec<bool>,
}

/// A linear map from the original space onto the space of a reduced cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub original_dim: usize,
    /// Reduced generator index to original generator index.
    pub kept: Vec<usize>,
    /// `r × original_dim`; reduced ray = `map · original ray`.
    pub map: RationalMatrix,
    /// Basis of the lineality space, one vector per row.
    pub lineality: RationalMatrix,
}

impl Reduction {
    pub fn is_identity(&self) -> bool {
        self.lineality.is_empty()
            && self.map == RationalMatrix::identity(self.original_dim)
            && self.kept.iter().enumerate().all(|(i, &k)| i == k)
    }

    /// Pulls a reduced-space normal back to the original space.
    pub fn lift_normal(&self, f: &[BigInt]) -> Vec<BigInt> {
        let f = to_rational(f);
        let lifted = self.map.transpose().mul_vec(&f);
        primitive_integer(&lifted)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Provenance {
    pub homogenization: Option<Homogenization>,
    pub reduction: Option<Reduction>,
}

/// The cone generated by the rows of `rays`.
#[derive(Clone, Debug)]
pub struct Cone {
    rays: RationalMatrix,
    int_rays: Vec<Vec<BigInt>>,
    provenance: Provenance,
}

/// A facet: its incident generators and an inward integer normal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Facet {
    pub support: FaceSet,
    pub normal: Vec<BigInt>,
}

impl Cone {
    pub fn new(rays: RationalMatrix) -> Result<Self> {
        if rays.rows() == 0 || rays.cols() == 0 {
            return Err(Error::EmptyInput);
        }
        let int_rays = rays.row_iter().map(primitive_integer).collect();
        Ok(Self {
            rays,
            int_rays,
            provenance: Provenance::default(),
        })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(RationalMatrix::from_i64_rows(rows))
    }

    pub fn from_int_rows(dim: usize, rows: &[Vec<BigInt>]) -> Result<Self> {
        Self::new(RationalMatrix::from_rows(
            dim,
            rows.iter().map(|r| to_rational(r)).collect(),
        ))
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn rays(&self) -> &RationalMatrix {
        &self.rays
    }

    /// Generators rescaled to primitive integer vectors.
    pub fn int_rays(&self) -> &[Vec<BigInt>] {
        &self.int_rays
    }

    pub fn num_rays(&self) -> usize {
        self.rays.rows()
    }

    pub fn dim(&self) -> usize {
        self.rays.cols()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn rank(&self) -> usize {
        crate::exactlin::rank(&self.rays)
    }

    /// `f(v_i)` on the integer-scaled generator; its sign is exact.
    pub fn value(&self, normal: &[BigInt], i: usize) -> BigInt {
        int_dot(normal, &self.int_rays[i])
    }

    pub fn support_of(&self, normal: &[BigInt]) -> FaceSet {
        FaceSet::from_sorted(
            (0..self.num_rays())
                .filter(|&i| self.value(normal, i).is_zero())
                .collect(),
        )
    }

    /// True when `normal` is nonnegative on every generator.
    pub fn is_valid_normal(&self, normal: &[BigInt]) -> bool {
        (0..self.num_rays()).all(|i| !self.value(normal, i).is_negative())
    }

    pub fn facet_from_normal(&self, normal: Vec<BigInt>) -> Facet {
        let normal = primitive_int(normal);
        Facet {
            support: self.support_of(&normal),
            normal,
        }
    }

    /// Rank of the generators indexed by `s`.
    pub fn rank_of(&self, s: &FaceSet) -> usize {
        crate::exactlin::rank(&self.rays.select_rows(s.indices()))
    }

    /// The cone spanned by a subset of generators, in the same space.
    pub fn subcone(&self, s: &FaceSet) -> Result<Cone> {
        Cone::new(self.rays.select_rows(s.indices()))
    }

    /// The cone spanned by the generators in `s`, projected onto coordinates
    /// on which it is full-dimensional. Generators keep their relative order.
    ///
    /// The face of a pointed cone is pointed, so no LP is needed.
    pub fn face_cone(&self, s: &FaceSet) -> Result<Cone> {
        let sub = self.rays.select_rows(s.indices());
        let (_, pivots) = sub.rref();
        if pivots.is_empty() {
            return Err(Error::DegenerateCone(0));
        }
        let map = RationalMatrix::identity(self.dim()).select_rows(&pivots);
        let projected = sub.select_cols(&pivots);
        Ok(Cone::new(projected)?.with_provenance(Provenance {
            homogenization: None,
            reduction: Some(Reduction {
                original_dim: self.dim(),
                kept: s.indices().to_vec(),
                map,
                lineality: RationalMatrix::zeros(0, self.dim()),
            }),
        }))
    }

    /// Relabels generators: row `i` of the result is row `order[i]` of self.
    pub fn reordered(&self, order: &[usize]) -> Result<Cone> {
        Ok(Cone::new(self.rays.select_rows(order))?.with_provenance(self.provenance.clone()))
    }
}

/// Cone over `(p, 1)` for each point and `(r, 0)` for each ray.
pub fn homogenize(points: &RationalMatrix, rays: &RationalMatrix) -> Result<Cone> {
    let total = points.rows() + rays.rows();
    if total == 0 {
        return Err(Error::EmptyInput);
    }
    if points.rows() > 0 && rays.rows() > 0 && points.cols() != rays.cols() {
        return Err(Error::Dimension(format!(
            "points have {} coordinates but rays have {}",
            points.cols(),
            rays.cols()
        )));
    }
    let dim = if points.rows() > 0 {
        points.cols()
    } else {
        rays.cols()
    };
    let mut rows = Vec::with_capacity(total);
    for p in points.row_iter() {
        let mut r = p.to_vec();
        r.push(Rational::one());
        rows.push(r);
    }
    for v in rays.row_iter() {
        let mut r = v.to_vec();
        r.push(Rational::zero());
        rows.push(r);
    }
    let mut is_point = vec![true; points.rows()];
    is_point.extend(std::iter::repeat(false).take(rays.rows()));
    Ok(
        Cone::new(RationalMatrix::from_rows(dim + 1, rows))?.with_provenance(Provenance {
            homogenization: Some(Homogenization { is_point }),
            reduction: None,
        }),
    )
}

fn is_pointed(rays: &RationalMatrix) -> Result<bool> {
    let constraints = rays
        .row_iter()
        .map(|r| LinearConstraint::nonneg(r.to_vec(), -Rational::one()))
        .collect();
    let lp = LpProblem {
        objective: vec![Rational::zero(); rays.cols()],
        constraints,
    };
    Ok(lp_solve(&lp)?.status != LpStatus::Infeasible)
}

/// Whether `-v_i` lies in the cone, i.e. `v_i` lies in the lineality space.
fn in_lineality(rays: &RationalMatrix, i: usize) -> Result<bool> {
    let n = rays.rows();
    let mut constraints: Vec<LinearConstraint> = (0..n)
        .map(|j| {
            let mut e = vec![Rational::zero(); n];
            e[j] = Rational::one();
            LinearConstraint::nonneg(e, Rational::zero())
        })
        .collect();
    for k in 0..rays.cols() {
        let coeffs: Vec<Rational> = (0..n).map(|j| rays[(j, k)].clone()).collect();
        constraints.push(LinearConstraint::zero(coeffs, rays[(i, k)].clone()));
    }
    let lp = LpProblem {
        objective: vec![Rational::zero(); n],
        constraints,
    };
    Ok(lp_solve(&lp)?.status != LpStatus::Infeasible)
}

/// Quotients out the lineality space, projects onto independent
/// coordinates and drops redundant generators. The returned cone is pointed
/// and full-dimensional; its provenance lets facets be lifted back.
pub fn reduce_to_pointed_fulldim(c: &Cone) -> Result<Cone> {
    let rays = c.rays();
    let d = c.dim();
    let nonzero: Vec<usize> = (0..c.num_rays())
        .filter(|&i| rays.row(i).iter().any(|x| !x.is_zero()))
        .collect();
    if nonzero.is_empty() {
        return Err(Error::DegenerateCone(0));
    }
    let rays = rays.select_rows(&nonzero);
    let mut line_rows = Vec::new();
    if !is_pointed(&rays)? {
        for i in 0..rays.rows() {
            if in_lineality(&rays, i)? {
                line_rows.push(i);
            }
        }
    }
    let lin_all = rays.select_rows(&line_rows);
    let lineality = lin_all.select_rows(&lin_all.independent_rows());
    if line_rows.len() == rays.rows() {
        return Err(Error::DegenerateCone(lineality.rows()));
    }
    let m1 = if lineality.is_empty() {
        RationalMatrix::identity(d)
    } else {
        kernel_basis(&lineality)
    };
    let remaining: Vec<usize> = (0..rays.rows())
        .filter(|i| !line_rows.contains(i))
        .collect();
    let images = RationalMatrix::from_rows(
        m1.rows(),
        remaining.iter().map(|&i| m1.mul_vec(rays.row(i))).collect(),
    );
    let (_, pivots) = images.rref();
    let map = m1.select_rows(&pivots);
    let mut reduced = images.select_cols(&pivots);
    let mut kept: Vec<usize> = remaining.iter().map(|&i| nonzero[i]).collect();

    let mut k = 0;
    while k < reduced.rows() {
        if reduced.rows() > 1 && is_redundant_generator(&reduced, k, &[])? {
            let idx: Vec<usize> = (0..reduced.rows()).filter(|&j| j != k).collect();
            reduced = reduced.select_rows(&idx);
            kept.remove(k);
        } else {
            k += 1;
        }
    }
    Ok(Cone::new(reduced)?.with_provenance(Provenance {
        homogenization: c.provenance().homogenization.clone(),
        reduction: Some(Reduction {
            original_dim: d,
            kept,
            map,
            lineality,
        }),
    }))
}

/// All facets of a pointed full-dimensional cone, sorted by normal.
pub fn dual_description_dd(c: &Cone) -> Result<Vec<Facet>> {
    let normals = dd::extreme_normals(c.int_rays(), c.dim())?;
    let mut facets: Vec<Facet> = normals
        .into_iter()
        .map(|f| c.facet_from_normal(f))
        .collect();
    facets.sort_by(|a, b| a.normal.cmp(&b.normal));
    Ok(facets)
}

/// Entry `[i][j]` is true iff generator `i` lies on facet `j`.
pub fn incidence_matrix(c: &Cone, facets: &[Facet]) -> Vec<Vec<bool>> {
    (0..c.num_rays())
        .map(|i| {
            facets
                .iter()
                .map(|f| c.value(&f.normal, i).is_zero())
                .collect()
        })
        .collect()
}

/// The other facet through `ridge`.
pub fn gift_wrap(c: &Cone, f: &Facet, ridge: &FaceSet) -> Result<Facet> {
    let d = c.dim();
    let not_ridge = || Error::NotARidge(ridge.indices().to_vec());
    if !ridge.is_subset(&f.support) || c.rank_of(ridge) + 2 != d {
        return Err(not_ridge());
    }
    let kernel = kernel_basis(&c.rays().select_rows(ridge.indices()));
    let fr = to_rational(&f.normal);
    // A kernel vector independent of f.
    let h = kernel
        .row_iter()
        .find(|row| {
            let pair = RationalMatrix::from_rows(d, vec![row.to_vec(), fr.clone()]);
            crate::exactlin::rank(&pair) == 2
        })
        .ok_or_else(not_ridge)?
        .to_vec();
    let inside = f
        .support
        .iter()
        .find(|&j| !ridge.contains(j))
        .ok_or_else(not_ridge)?;
    let hv = dot(&h, c.rays().row(inside));
    if hv.is_zero() {
        return Err(not_ridge());
    }
    let h: Vec<Rational> = if hv.is_negative() {
        h.iter().map(|x| -x).collect()
    } else {
        h
    };
    let mut best: Option<Rational> = None;
    for j in (0..c.num_rays()).filter(|&j| !f.support.contains(j)) {
        let fv = dot(&fr, c.rays().row(j));
        let t = dot(&h, c.rays().row(j)) / fv;
        if best.as_ref().map_or(true, |b| t < *b) {
            best = Some(t);
        }
    }
    let t = best.ok_or_else(not_ridge)?;
    let g: Vec<Rational> = h.iter().zip(&fr).map(|(a, b)| a - &t * b).collect();
    let facet = c.facet_from_normal(primitive_integer(&g));
    if !c.is_valid_normal(&facet.normal) || c.rank_of(&facet.support) + 1 != d {
        return Err(not_ridge());
    }
    Ok(facet)
}

/// Ridges of `f` as generator sets of `c`, via Double Description on the
/// facet's own cone.
pub fn ridges_of(c: &Cone, f: &Facet) -> Result<Vec<FaceSet>> {
    let face = c.face_cone(&f.support)?;
    let local = dual_description_dd(&face)?;
    let mut out: Vec<FaceSet> = local
        .iter()
        .map(|r| r.support.map_through(f.support.indices()))
        .collect();
    out.sort();
    Ok(out)
}

/// Checks that the fine boundary complex subdivides the coarse one. Fine
/// supports index the perturbed generators; `nu[i]` is the perturbed index
/// of original generator `i`.
pub fn boundary_complex_refines(coarse: &[Facet], fine: &[Facet], nu: &[usize]) -> bool {
    let mut back = vec![usize::MAX; nu.len()];
    for (i, &j) in nu.iter().enumerate() {
        if j >= nu.len() || back[j] != usize::MAX {
            return false;
        }
        back[j] = i;
    }
    let mapped: Vec<FaceSet> = fine
        .iter()
        .map(|f| {
            f.support
                .iter()
                .map(|j| back.get(j).copied().unwrap_or(usize::MAX))
                .collect()
        })
        .collect();
    if mapped
        .iter()
        .flat_map(|s| s.iter())
        .any(|x| x == usize::MAX)
    {
        return false;
    }
    let mut covered: Vec<Vec<usize>> = vec![Vec::new(); coarse.len()];
    for s in &mapped {
        let owners: Vec<usize> = (0..coarse.len())
            .filter(|&k| s.is_subset(&coarse[k].support))
            .collect();
        if owners.len() != 1 {
            return false;
        }
        covered[owners[0]].extend(s.iter());
    }
    coarse
        .iter()
        .zip(covered)
        .all(|(c, cov)| FaceSet::new(cov) == c.support)
}

/// Primitive normal through the given generators with `c` on its
/// nonnegative side, if those generators span a facet hyperplane.
pub fn facet_through(c: &Cone, s: &FaceSet) -> Option<Facet> {
    if c.rank_of(s) + 1 != c.dim() {
        return None;
    }
    let k = kernel_basis(&c.rays().select_rows(s.indices()));
    let normal = primitive_integer(k.row(0));
    let signs: Vec<BigInt> = (0..c.num_rays()).map(|i| c.value(&normal, i)).collect();
    let normal = if signs.iter().all(|x| !x.is_negative()) {
        normal
    } else if signs.iter().all(|x| !x.is_positive()) {
        normal.iter().map(|x| -x).collect()
    } else {
        return None;
    };
    Some(c.facet_from_normal(normal))
}

#[cfg(test)]
mod tests;
