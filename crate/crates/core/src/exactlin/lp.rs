//! Dense two-phase simplex over the rationals with Bland's rule.

use num_traits::{One, Signed, Zero};

use super::{dot, Rational, RationalMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    /// `coeffs . x + constant >= 0`
    NonNegative,
    /// `coeffs . x + constant == 0`
    Zero,
}

#[derive(Clone, Debug)]
pub struct LinearConstraint {
    pub coeffs: Vec<Rational>,
    pub constant: Rational,
    pub kind: ConstraintKind,
}

impl LinearConstraint {
    pub fn nonneg(coeffs: Vec<Rational>, constant: Rational) -> Self {
        Self {
            coeffs,
            constant,
            kind: ConstraintKind::NonNegative,
        }
    }

    pub fn zero(coeffs: Vec<Rational>, constant: Rational) -> Self {
        Self {
            coeffs,
            constant,
            kind: ConstraintKind::Zero,
        }
    }

    fn eval(&self, x: &[Rational]) -> Rational {
        dot(&self.coeffs, x) + &self.constant
    }
}

/// Maximize `objective . x` over free variables `x` subject to `constraints`.
#[derive(Clone, Debug)]
pub struct LpProblem {
    pub objective: Vec<Rational>,
    pub constraints: Vec<LinearConstraint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Clone, Debug)]
pub struct LpResult {
    pub status: LpStatus,
    /// Optimal: the solution. Unbounded: an improving ray. Infeasible:
    /// Farkas multipliers, one per constraint.
    pub certificate: Vec<Rational>,
    /// Feasible point (optimal solution, or the ray origin when unbounded).
    pub point: Option<Vec<Rational>>,
    pub value: Option<Rational>,
}

impl LpResult {
    /// Checks the certificate against the problem by substitution.
    pub fn verify(&self, lp: &LpProblem) -> bool {
        let feasible = |x: &[Rational]| {
            lp.constraints.iter().all(|c| {
                let v = c.eval(x);
                match c.kind {
                    ConstraintKind::NonNegative => !v.is_negative(),
                    ConstraintKind::Zero => v.is_zero(),
                }
            })
        };
        match self.status {
            LpStatus::Optimal => {
                feasible(&self.certificate)
                    && self.value.as_ref() == Some(&dot(&lp.objective, &self.certificate))
            }
            LpStatus::Unbounded => {
                let Some(p) = &self.point else { return false };
                let r = &self.certificate;
                feasible(p)
                    && dot(&lp.objective, r).is_positive()
                    && lp.constraints.iter().all(|c| {
                        let v = dot(&c.coeffs, r);
                        match c.kind {
                            ConstraintKind::NonNegative => !v.is_negative(),
                            ConstraintKind::Zero => v.is_zero(),
                        }
                    })
            }
            LpStatus::Infeasible => {
                let mu = &self.certificate;
                if mu.len() != lp.constraints.len() {
                    return false;
                }
                let n = lp.objective.len();
                let mut combo = vec![Rational::zero(); n];
                let mut constant = Rational::zero();
                for (c, m) in lp.constraints.iter().zip(mu) {
                    if c.kind == ConstraintKind::NonNegative && m.is_negative() {
                        return false;
                    }
                    for (acc, a) in combo.iter_mut().zip(&c.coeffs) {
                        *acc += m * a;
                    }
                    constant += m * &c.constant;
                }
                combo.iter().all(Zero::is_zero) && constant.is_negative()
            }
        }
    }
}

struct Tableau {
    t: RationalMatrix,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.t[(row, col)].recip();
        for x in self.t.row_mut(row) {
            *x *= &inv;
        }
        self.rhs[row] *= &inv;
        for r in 0..self.t.rows() {
            if r == row || self.t[(r, col)].is_zero() {
                continue;
            }
            let f = self.t[(r, col)].clone();
            for j in 0..self.t.cols() {
                if !self.t[(row, j)].is_zero() {
                    let v = &self.t[(row, j)] * &f;
                    self.t[(r, j)] -= v;
                }
            }
            let v = &self.rhs[row] * &f;
            self.rhs[r] -= v;
        }
        self.basis[row] = col;
    }

    fn reduced_cost(&self, cost: &[Rational], col: usize) -> Rational {
        let mut d = cost[col].clone();
        for (r, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() && !self.t[(r, col)].is_zero() {
                d -= &cost[b] * &self.t[(r, col)];
            }
        }
        d
    }

    /// Maximizes `cost` over the columns allowed to enter. Returns the
    /// unbounded entering column, if any.
    fn run(&mut self, cost: &[Rational], allowed: &[bool]) -> Option<usize> {
        loop {
            let entering = (0..self.t.cols()).find(|&j| {
                allowed[j] && !self.basis.contains(&j) && self.reduced_cost(cost, j).is_positive()
            });
            let Some(col) = entering else { return None };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.t.rows() {
                let a = &self.t[(r, col)];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => {
                        ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, col),
                None => return Some(col),
            }
        }
    }

    fn value_of(&self, col: usize) -> Rational {
        self.basis
            .iter()
            .position(|&b| b == col)
            .map_or_else(Rational::zero, |r| self.rhs[r].clone())
    }
}

/// Solves the problem exactly. Deterministic: Bland's rule on lowest index.
pub fn lp_solve(lp: &LpProblem) -> Result<LpResult> {
    let n = lp.objective.len();
    for c in &lp.constraints {
        if c.coeffs.len() != n {
            return Err(Error::Dimension(format!(
                "constraint has {} coefficients, objective has {n}",
                c.coeffs.len()
            )));
        }
    }
    let m = lp.constraints.len();
    let slack_rows: Vec<usize> = (0..m)
        .filter(|&i| lp.constraints[i].kind == ConstraintKind::NonNegative)
        .collect();
    let ns = slack_rows.len();
    // columns: x+ (n), x- (n), slacks (ns), artificials (m)
    let art0 = 2 * n + ns;
    let cols = art0 + m;
    let mut t = RationalMatrix::zeros(m, cols);
    let mut rhs = vec![Rational::zero(); m];
    let mut row_sign = vec![Rational::one(); m];
    for (i, c) in lp.constraints.iter().enumerate() {
        // coeffs . x - s = -constant
        let negate = c.constant.is_positive();
        let s = if negate {
            -Rational::one()
        } else {
            Rational::one()
        };
        for k in 0..n {
            t[(i, k)] = &c.coeffs[k] * &s;
            t[(i, n + k)] = -&c.coeffs[k] * &s;
        }
        if let Some(si) = slack_rows.iter().position(|&r| r == i) {
            t[(i, 2 * n + si)] = -s.clone();
        }
        t[(i, art0 + i)] = Rational::one();
        rhs[i] = -&c.constant * &s;
        row_sign[i] = s;
    }
    let mut tab = Tableau {
        t,
        rhs,
        basis: (art0..cols).collect(),
    };

    let mut phase1 = vec![Rational::zero(); cols];
    for c in phase1.iter_mut().skip(art0) {
        *c = -Rational::one();
    }
    let allowed_all = vec![true; cols];
    tab.run(&phase1, &allowed_all);
    let infeas: Rational = tab
        .rhs
        .iter()
        .zip(&tab.basis)
        .filter(|(_, &b)| b >= art0)
        .map(|(v, _)| v.clone())
        .sum();
    if infeas.is_positive() {
        // y = c_B B^-1, read off the artificial columns
        let mut y = vec![Rational::zero(); m];
        for (i, yi) in y.iter_mut().enumerate() {
            for (r, &b) in tab.basis.iter().enumerate() {
                if !phase1[b].is_zero() {
                    *yi += &phase1[b] * &tab.t[(r, art0 + i)];
                }
            }
        }
        let mu: Vec<Rational> = y.iter().zip(&row_sign).map(|(yi, s)| -(yi * s)).collect();
        return Ok(LpResult {
            status: LpStatus::Infeasible,
            certificate: mu,
            point: None,
            value: None,
        });
    }

    // drive zero-level artificials out of the basis where possible
    for r in 0..m {
        if tab.basis[r] >= art0 {
            if let Some(j) = (0..art0).find(|&j| !tab.t[(r, j)].is_zero()) {
                tab.pivot(r, j);
            }
        }
    }

    let mut cost = vec![Rational::zero(); cols];
    for k in 0..n {
        cost[k] = lp.objective[k].clone();
        cost[n + k] = -lp.objective[k].clone();
    }
    let allowed: Vec<bool> = (0..cols).map(|j| j < art0).collect();
    let unbounded = tab.run(&cost, &allowed);

    let x: Vec<Rational> = (0..n)
        .map(|k| tab.value_of(k) - tab.value_of(n + k))
        .collect();
    if let Some(col) = unbounded {
        let mut dir = vec![Rational::zero(); cols];
        dir[col] = Rational::one();
        for (r, &b) in tab.basis.iter().enumerate() {
            dir[b] = -tab.t[(r, col)].clone();
        }
        let ray: Vec<Rational> = (0..n).map(|k| &dir[k] - &dir[n + k]).collect();
        return Ok(LpResult {
            status: LpStatus::Unbounded,
            certificate: ray,
            point: Some(x),
            value: None,
        });
    }
    let value = dot(&lp.objective, &x);
    Ok(LpResult {
        status: LpStatus::Optimal,
        certificate: x.clone(),
        point: Some(x),
        value: Some(value),
    })
}

/// Decides whether `f(v_i) >= 0` is implied by the remaining generator
/// inequalities together with `f(v_k) = 0` for `k` in `equality_set`.
pub fn is_redundant_generator(
    rays: &RationalMatrix,
    i: usize,
    equality_set: &[usize],
) -> Result<bool> {
    let n = rays.rows();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    if let Some(&k) = equality_set.iter().find(|&&k| k >= n) {
        return Err(Error::IndexOutOfRange { index: k, len: n });
    }
    let mut constraints = Vec::with_capacity(n);
    for j in 0..n {
        let row = rays.row(j).to_vec();
        if j == i {
            constraints.push(LinearConstraint::nonneg(row, Rational::one()));
        } else if equality_set.contains(&j) {
            constraints.push(LinearConstraint::zero(row, Rational::zero()));
        } else {
            constraints.push(LinearConstraint::nonneg(row, Rational::zero()));
        }
    }
    let objective: Vec<Rational> = rays.row(i).iter().map(|x| -x).collect();
    let res = lp_solve(&LpProblem {
        objective,
        constraints,
    })?;
    debug_assert_eq!(res.status, LpStatus::Optimal);
    Ok(res.value.is_some_and(|v| v.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::int;

    fn c(coeffs: &[i64], constant: i64) -> LinearConstraint {
        LinearConstraint::nonneg(coeffs.iter().map(|&x| int(x)).collect(), int(constant))
    }

    #[test]
    fn bounded_interval() {
        let lp = LpProblem {
            objective: vec![int(1)],
            constraints: vec![c(&[1], 0), c(&[-1], 1)],
        };
        let r = lp_solve(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert_eq!(r.certificate, vec![int(1)]);
        assert!(r.verify(&lp));
    }

    #[test]
    fn unbounded_ray() {
        let lp = LpProblem {
            objective: vec![int(1)],
            constraints: vec![c(&[1], 0)],
        };
        let r = lp_solve(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Unbounded);
        assert!(r.verify(&lp));
    }

    #[test]
    fn infeasible_farkas() {
        let lp = LpProblem {
            objective: vec![int(0)],
            constraints: vec![c(&[1], -1), c(&[-1], 0)],
        };
        let r = lp_solve(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Infeasible);
        assert!(r.verify(&lp));
    }

    #[test]
    fn equality_constraints() {
        // max x + y with x + y = 3, x >= 0, y >= 1
        let lp = LpProblem {
            objective: vec![int(1), int(2)],
            constraints: vec![
                LinearConstraint::zero(vec![int(1), int(1)], int(-3)),
                c(&[1, 0], 0),
                c(&[0, 1], -1),
            ],
        };
        let r = lp_solve(&lp).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert_eq!(r.value, Some(int(6)));
        assert!(r.verify(&lp));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let lp = LpProblem {
            objective: vec![int(1), int(1)],
            constraints: vec![c(&[1], 0)],
        };
        assert!(lp_solve(&lp).is_err());
    }

    #[test]
    fn redundancy_examples() {
        let square = RationalMatrix::from_i64_rows(&[
            vec![1, 1, 1],
            vec![1, -1, 1],
            vec![-1, 1, 1],
            vec![-1, -1, 1],
        ]);
        assert!(!is_redundant_generator(&square, 0, &[1]).unwrap());

        let simplex = RationalMatrix::identity(3);
        for i in 0..3 {
            assert!(!is_redundant_generator(&simplex, i, &[]).unwrap());
        }

        let dup = RationalMatrix::from_i64_rows(&[
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![0, 1, 0],
        ]);
        assert!(is_redundant_generator(&dup, 3, &[]).unwrap());
        assert!(is_redundant_generator(&dup, 9, &[]).is_err());
    }
}
