//! Individualization-refinement search on complete edge-colored graphs.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use super::ColoredGraph;
use crate::permgrp::Permutation;

/// Ordered partition: `cells` in order, `cell_of[v]` the index of v's cell.
#[derive(Clone, Debug)]
struct Partition {
    cells: Vec<Vec<usize>>,
    cell_of: Vec<usize>,
}

impl Partition {
    fn from_colors(colors: &[u32]) -> Self {
        let mut distinct: Vec<u32> = colors.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let mut cells = vec![Vec::new(); distinct.len()];
        for (v, c) in colors.iter().enumerate() {
            cells[distinct.binary_search(c).unwrap()].push(v);
        }
        let mut p = Partition {
            cells,
            cell_of: vec![0; colors.len()],
        };
        p.reindex();
        p
    }

    fn reindex(&mut self) {
        for (k, cell) in self.cells.iter().enumerate() {
            for &v in cell {
                self.cell_of[v] = k;
            }
        }
    }

    fn target_cell(&self) -> Option<usize> {
        self.cells.iter().position(|c| c.len() > 1)
    }

    fn individualize(&self, v: usize) -> Partition {
        let k = self.cell_of[v];
        let mut cells = Vec::with_capacity(self.cells.len() + 1);
        cells.extend(self.cells[..k].iter().cloned());
        cells.push(vec![v]);
        cells.push(self.cells[k].iter().copied().filter(|&x| x != v).collect());
        cells.extend(self.cells[k + 1..].iter().cloned());
        let mut p = Partition {
            cells,
            cell_of: vec![0; self.cell_of.len()],
        };
        p.reindex();
        p
    }
}

/// Refines to the coarsest equitable partition finer than `p`. Returns an
/// isomorphism-invariant hash of the result.
fn refine(g: &ColoredGraph, p: &mut Partition) -> u64 {
    let n = g.n;
    let mut sig: Vec<Vec<(u32, u32, u32)>> = vec![Vec::new(); n];
    loop {
        for v in 0..n {
            let mut pairs: Vec<(u32, u32)> = (0..n)
                .filter(|&u| u != v)
                .map(|u| (p.cell_of[u] as u32, g.edge(v, u)))
                .collect();
            pairs.sort_unstable();
            let s = &mut sig[v];
            s.clear();
            for (c, e) in pairs {
                match s.last_mut() {
                    Some(last) if last.0 == c && last.1 == e => last.2 += 1,
                    _ => s.push((c, e, 1)),
                }
            }
        }
        let mut cells = Vec::with_capacity(p.cells.len());
        for cell in &p.cells {
            let mut members = cell.clone();
            members.sort_by(|&a, &b| sig[a].cmp(&sig[b]).then(a.cmp(&b)));
            let mut start = 0;
            for i in 1..=members.len() {
                if i == members.len() || sig[members[i]] != sig[members[start]] {
                    cells.push(members[start..i].to_vec());
                    start = i;
                }
            }
        }
        let changed = cells.len() != p.cells.len();
        p.cells = cells;
        p.reindex();
        if !changed {
            break;
        }
    }
    let mut h = DefaultHasher::new();
    for cell in &p.cells {
        cell.len().hash(&mut h);
        sig[cell[0]].hash(&mut h);
    }
    h.finish()
}

/// One node of the leftmost path: its partition, invariant and the
/// vertex individualized to reach the next node.
struct PathNode {
    partition: Partition,
    invariant: u64,
    chosen: Option<usize>,
}

fn first_path(g: &ColoredGraph) -> (Vec<PathNode>, Vec<usize>) {
    let mut p = Partition::from_colors(&g.vertex_colors);
    let mut inv = refine(g, &mut p);
    let mut path = Vec::new();
    loop {
        match p.target_cell() {
            None => {
                let leaf: Vec<usize> = p.cells.iter().map(|c| c[0]).collect();
                path.push(PathNode {
                    partition: p,
                    invariant: inv,
                    chosen: None,
                });
                return (path, leaf);
            }
            Some(k) => {
                let v = p.cells[k][0];
                let mut child = p.individualize(v);
                let child_inv = refine(g, &mut child);
                path.push(PathNode {
                    partition: p,
                    invariant: inv,
                    chosen: Some(v),
                });
                p = child;
                inv = child_inv;
            }
        }
    }
}

/// Checks that `leaf1[i] -> leaf2[i]` maps `g1` onto `g2` and returns it.
fn leaf_map(
    g1: &ColoredGraph,
    g2: &ColoredGraph,
    leaf1: &[usize],
    leaf2: &[usize],
) -> Option<Permutation> {
    let n = g1.n;
    let mut images = vec![0; n];
    for (a, b) in leaf1.iter().zip(leaf2) {
        images[*a] = *b;
    }
    for u in 0..n {
        if g1.vertex_colors[u] != g2.vertex_colors[images[u]] {
            return None;
        }
        for v in u + 1..n {
            if g1.edge(u, v) != g2.edge(images[u], images[v]) {
                return None;
            }
        }
    }
    Permutation::from_images(images).ok()
}

/// Depth-first search in `g2` below `p` for a leaf whose map from the
/// first-path leaf of `g1` is an isomorphism. `invariants` are those of the
/// first path in `g1`, indexed by depth.
fn find_leaf(
    g1: &ColoredGraph,
    g2: &ColoredGraph,
    p: &Partition,
    depth: usize,
    invariants: &[u64],
    leaf1: &[usize],
) -> Option<Permutation> {
    match p.target_cell() {
        None => {
            if depth + 1 != invariants.len() {
                return None;
            }
            let leaf2: Vec<usize> = p.cells.iter().map(|c| c[0]).collect();
            leaf_map(g1, g2, leaf1, &leaf2)
        }
        Some(k) => {
            if depth + 1 >= invariants.len() {
                return None;
            }
            for &v in &p.cells[k] {
                let mut child = p.individualize(v);
                if refine(g2, &mut child) != invariants[depth + 1] {
                    continue;
                }
                if let Some(x) = find_leaf(g1, g2, &child, depth + 1, invariants, leaf1) {
                    return Some(x);
                }
            }
            None
        }
    }
}

fn orbit_mask(v: usize, gens: &[Permutation], n: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[v] = true;
    let mut stack = vec![v];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = g.apply(x);
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// Generators of the automorphism group of `g`.
pub(crate) fn automorphism_generators(g: &ColoredGraph) -> Vec<Permutation> {
    let (path, leaf) = first_path(g);
    let invariants: Vec<u64> = path.iter().map(|node| node.invariant).collect();
    let mut found: Vec<Permutation> = Vec::new();
    for depth in (0..path.len()).rev() {
        let node = &path[depth];
        let Some(chosen) = node.chosen else { continue };
        let cell = &node.partition.cells[node.partition.cell_of[chosen]];
        let mut covered = orbit_mask(chosen, &found, g.n);
        for &w in cell {
            if covered[w] {
                continue;
            }
            let mut child = node.partition.individualize(w);
            if refine(g, &mut child) != invariants[depth + 1] {
                continue;
            }
            if let Some(x) = find_leaf(g, g, &child, depth + 1, &invariants, &leaf) {
                found.push(x);
                covered = orbit_mask(chosen, &found, g.n);
            }
        }
    }
    found
}

/// Some isomorphism from `g1` onto `g2` (colors compared by id).
pub(crate) fn isomorphism(g1: &ColoredGraph, g2: &ColoredGraph) -> Option<Permutation> {
    if g1.n != g2.n {
        return None;
    }
    let (path, leaf) = first_path(g1);
    let invariants: Vec<u64> = path.iter().map(|node| node.invariant).collect();
    let mut p = Partition::from_colors(&g2.vertex_colors);
    let mut c1: Vec<u32> = g1.vertex_colors.clone();
    let mut c2: Vec<u32> = g2.vertex_colors.clone();
    c1.sort_unstable();
    c2.sort_unstable();
    if c1 != c2 || refine(g2, &mut p) != invariants[0] {
        return None;
    }
    find_leaf(g1, g2, &p, 0, &invariants, &leaf)
}
