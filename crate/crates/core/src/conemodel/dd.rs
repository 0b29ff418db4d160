use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exactlin::{int_dot, primitive_int, primitive_integer, RationalMatrix};

struct DdRay {
    normal: Vec<BigInt>,
    zeros: FixedBitSet,
}

/// Extreme rays of `{f : f·v_i ≥ 0 for all i}` for a full-dimensional
/// pointed cone generated by the integer rows `rays`, as primitive integer
/// vectors in input order of discovery.
pub(crate) fn extreme_normals(rays: &[Vec<BigInt>], dim: usize) -> Result<Vec<Vec<BigInt>>> {
    let n = rays.len();
    if dim == 0 {
        return Ok(Vec::new());
    }
    let rational = RationalMatrix::from_rows(
        dim,
        rays.iter()
            .map(|r| r.iter().map(|x| x.clone().into()).collect())
            .collect(),
    );
    let basis = rational.independent_rows();
    if basis.len() < dim {
        return Err(Error::NotFullDimensional {
            rank: basis.len(),
            dim,
        });
    }
    let inv = rational
        .select_rows(&basis)
        .inverse()
        .expect("independent rows form an invertible matrix");

    // Column j of the inverse is the normal vanishing on every basis row but j.
    let mut current: Vec<DdRay> = (0..dim)
        .map(|j| {
            let col: Vec<_> = (0..dim).map(|k| inv[(k, j)].clone()).collect();
            let normal = primitive_integer(&col);
            let mut zeros = FixedBitSet::with_capacity(n);
            for (k, &b) in basis.iter().enumerate() {
                if k != j {
                    zeros.insert(b);
                }
            }
            DdRay { normal, zeros }
        })
        .collect();

    let mut is_basis = vec![false; n];
    for &b in &basis {
        is_basis[b] = true;
    }
    for i in (0..n).filter(|&i| !is_basis[i]) {
        let v = &rays[i];
        let values: Vec<BigInt> = current.iter().map(|r| int_dot(&r.normal, v)).collect();
        let pos: Vec<usize> = (0..current.len())
            .filter(|&k| values[k].is_positive())
            .collect();
        let neg: Vec<usize> = (0..current.len())
            .filter(|&k| values[k].is_negative())
            .collect();
        if neg.is_empty() {
            for (k, r) in current.iter_mut().enumerate() {
                if values[k].is_zero() {
                    r.zeros.insert(i);
                }
            }
            continue;
        }
        let mut created = Vec::new();
        for &p in &pos {
            for &q in &neg {
                let common = {
                    let mut c = current[p].zeros.clone();
                    c.intersect_with(&current[q].zeros);
                    c
                };
                if common.count_ones(..) + 2 < dim {
                    continue;
                }
                let adjacent = current
                    .iter()
                    .enumerate()
                    .all(|(k, r)| k == p || k == q || !common.is_subset(&r.zeros));
                if !adjacent {
                    continue;
                }
                let a = &values[p];
                let b = -&values[q];
                let normal: Vec<BigInt> = current[q]
                    .normal
                    .iter()
                    .zip(&current[p].normal)
                    .map(|(fq, fp)| a * fq + &b * fp)
                    .collect();
                let mut zeros = common;
                zeros.insert(i);
                created.push(DdRay {
                    normal: primitive_int(normal),
                    zeros,
                });
            }
        }
        let mut next: Vec<DdRay> = Vec::with_capacity(current.len() + created.len());
        for (k, mut r) in current.into_iter().enumerate() {
            if values[k].is_negative() {
                continue;
            }
            if values[k].is_zero() {
                r.zeros.insert(i);
            }
            next.push(r);
        }
        next.extend(created);
        current = next;
    }
    Ok(current.into_iter().map(|r| r.normal).collect())
}
