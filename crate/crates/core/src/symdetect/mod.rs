//! Restricted and combinatorial automorphisms of vector families.

mod refine;

use crate::error::{Error, Result};
use crate::exactlin::{dot, Rational, RationalMatrix};
use crate::permgrp::{PermGroup, Permutation};

/// A complete graph with colored vertices and edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    pub n: usize,
    pub vertex_colors: Vec<u32>,
    /// Row-major `n × n`, symmetric.
    edge_colors: Vec<u32>,
}

impl ColoredGraph {
    pub fn new(
        n: usize,
        vertex_colors: Vec<u32>,
        edge: impl Fn(usize, usize) -> u32,
    ) -> Result<Self> {
        if vertex_colors.len() != n {
            return Err(Error::Dimension(format!(
                "{} vertex colors for {n} vertices",
                vertex_colors.len()
            )));
        }
        let mut edge_colors = vec![0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let c = edge(i, j);
                if c != edge(j, i) {
                    return Err(Error::Dimension(format!(
                        "edge color ({i},{j}) is not symmetric"
                    )));
                }
                edge_colors[i * n + j] = c;
                edge_colors[j * n + i] = c;
            }
        }
        Ok(Self {
            n,
            vertex_colors,
            edge_colors,
        })
    }

    #[inline]
    pub fn edge(&self, i: usize, j: usize) -> u32 {
        self.edge_colors[i * self.n + j]
    }
}

/// A group together with, for each generator, a matrix realizing it.
#[derive(Clone, Debug)]
pub struct AutomorphismResult {
    pub group: PermGroup,
    /// `A` with `A v_i = v_σ(i)` for every generator `σ`.
    pub witnesses: Vec<(Permutation, RationalMatrix)>,
}

/// The matrix `Q⁻¹` of the family and the pairwise values `vᵢᵀ Q⁻¹ vⱼ`.
fn metric_values(v: &RationalMatrix) -> Result<Vec<Vec<Rational>>> {
    let q = v.transpose().mul(v);
    let q_inv = q.inverse().ok_or(Error::NotFullDimensional {
        rank: crate::exactlin::rank(v),
        dim: v.cols(),
    })?;
    let w = v.mul(&q_inv);
    let n = v.rows();
    Ok((0..n)
        .map(|i| (0..n).map(|j| dot(w.row(i), v.row(j))).collect())
        .collect())
}

fn graph_from_values(values: &[Vec<Rational>], palette: &[Rational]) -> ColoredGraph {
    let n = values.len();
    let id = |x: &Rational| palette.binary_search(x).unwrap() as u32;
    let vc = (0..n).map(|i| id(&values[i][i])).collect();
    ColoredGraph::new(n, vc, |i, j| id(&values[i][j])).unwrap()
}

fn palette_of<'a>(values: impl Iterator<Item = &'a Vec<Rational>>) -> Vec<Rational> {
    let mut all: Vec<Rational> = values.flat_map(|r| r.iter().cloned()).collect();
    all.sort();
    all.dedup();
    all
}

/// The metric colored graph: colors are the distinct values `vᵢᵀ Q⁻¹ vⱼ`
/// with `Q = Σ vᵢ vᵢᵀ`, numbered in increasing order.
pub fn build_colored_graph(v: &RationalMatrix) -> Result<ColoredGraph> {
    Ok(build_with_palette(v)?.0)
}

/// The graph and the sorted distinct values its color ids refer to.
pub fn build_with_palette(v: &RationalMatrix) -> Result<(ColoredGraph, Vec<Rational>)> {
    let values = metric_values(v)?;
    let palette = palette_of(values.iter());
    Ok((graph_from_values(&values, &palette), palette))
}

/// The pairwise metric values `vᵢᵀ Q⁻¹ vⱼ`.
pub fn metric_matrix(v: &RationalMatrix) -> Result<Vec<Vec<Rational>>> {
    metric_values(v)
}

pub fn colored_graph_automorphisms(g: &ColoredGraph) -> PermGroup {
    PermGroup::new(g.n, refine::automorphism_generators(g)).unwrap()
}

/// Solves `A v_b = w_σ(b)` on a row basis of `v` and checks every row.
pub fn linear_witness(
    v: &RationalMatrix,
    w: &RationalMatrix,
    sigma: &Permutation,
) -> Option<RationalMatrix> {
    let basis = v.independent_rows();
    if basis.len() != v.cols() || v.cols() != w.cols() || v.rows() != w.rows() {
        return None;
    }
    let vb = v.select_rows(&basis).transpose();
    let images: Vec<usize> = basis.iter().map(|&b| sigma.apply(b)).collect();
    let wb = w.select_rows(&images).transpose();
    let a = wb.mul(&vb.inverse()?);
    (0..v.rows())
        .all(|i| a.mul_vec(v.row(i)) == w.row(sigma.apply(i)))
        .then_some(a)
}

pub fn restricted_automorphism_group(v: &RationalMatrix) -> Result<AutomorphismResult> {
    let g = build_colored_graph(v)?;
    let group = colored_graph_automorphisms(&g);
    let witnesses = group
        .generators()
        .iter()
        .map(|s| {
            linear_witness(v, v, s)
                .map(|a| (s.clone(), a))
                .ok_or_else(|| Error::GroupAction(format!("no linear map realizes {s}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AutomorphismResult { group, witnesses })
}

/// A bijection `σ` and matrix `A` with `A vᵢ = w_σ(i)`, if one exists.
pub fn restricted_isomorphism(
    v: &RationalMatrix,
    w: &RationalMatrix,
) -> Result<Option<(Permutation, RationalMatrix)>> {
    if v.rows() != w.rows() || v.cols() != w.cols() {
        return Ok(None);
    }
    let vv = metric_values(v)?;
    let wv = metric_values(w)?;
    let mut a: Vec<Rational> = vv.iter().flatten().cloned().collect();
    let mut b: Vec<Rational> = wv.iter().flatten().cloned().collect();
    a.sort();
    b.sort();
    if a != b {
        return Ok(None);
    }
    let palette = palette_of(vv.iter().chain(wv.iter()));
    let g1 = graph_from_values(&vv, &palette);
    let g2 = graph_from_values(&wv, &palette);
    let Some(sigma) = refine::isomorphism(&g1, &g2) else {
        return Ok(None);
    };
    Ok(linear_witness(v, w, &sigma).map(|a| (sigma, a)))
}

/// Automorphisms of the ray/facet incidence structure, acting on rays.
/// `incidence[i][j]` says whether ray `i` lies on facet `j`.
pub fn combinatorial_automorphisms(incidence: &[Vec<bool>]) -> PermGroup {
    let n = incidence.len();
    let m = incidence.first().map_or(0, Vec::len);
    let mut vc = vec![0u32; n];
    vc.extend(std::iter::repeat(1).take(m));
    let g = ColoredGraph::new(n + m, vc, |a, b| match (a < n, b < n) {
        (true, true) => 0,
        (false, false) => 1,
        (true, false) => 2 + incidence[a][b - n] as u32,
        (false, true) => 2 + incidence[b][a - n] as u32,
    })
    .unwrap();
    let gens = refine::automorphism_generators(&g)
        .into_iter()
        .map(|p| Permutation::from_images((0..n).map(|i| p.apply(i)).collect()).unwrap())
        .collect();
    PermGroup::new(n, gens).unwrap()
}
