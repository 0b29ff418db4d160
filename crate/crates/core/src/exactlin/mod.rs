//! Exact rational linear algebra and linear programming.
//!
//! Every routine here is exact: no floating point is used anywhere, so
//! incidence decisions (is this dot product zero?) are always reliable.

mod lp;
mod matrix;

use num_rational::BigRational;
use num_traits::Zero;

pub use lp::{
    is_redundant_generator, lp_solve, ConstraintKind, LinearConstraint, LpProblem, LpResult,
    LpStatus,
};
pub use matrix::{
    dot, int_dot, primitive_int, primitive_integer, sign, to_rational, RationalMatrix,
};

/// Exact arbitrary-precision rational, always kept in lowest terms.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn rank(m: &RationalMatrix) -> usize {
    m.rref().1.len()
}

/// Basis of the right null space `{x : M x = 0}`, one basis vector per row.
pub fn kernel_basis(m: &RationalMatrix) -> RationalMatrix {
    let (red, pivots) = m.rref();
    let cols = m.cols();
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rational::zero(); cols];
        v[free] = int(1);
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -red[(r, free)].clone();
        }
        basis.push(v);
    }
    RationalMatrix::from_rows(cols, basis)
}

/// Some solution of `M x = b`, or `None` when the system is inconsistent.
/// Free variables are set to zero.
pub fn solve_linear(m: &RationalMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(m.rows(), b.len(), "right-hand side length mismatch");
    let cols = m.cols();
    let mut aug = RationalMatrix::zeros(m.rows(), cols + 1);
    for i in 0..m.rows() {
        for j in 0..cols {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, cols)] = b[i].clone();
    }
    let (red, pivots) = aug.rref();
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = red[(r, cols)].clone();
    }
    Some(x)
}
