//! Backtrack searches over stabilizer chains whose base starts with a set.

use super::chain::StabChain;
use super::perm::Permutation;
use crate::faceset::FaceSet;

/// Some element of the chain's group mapping the first `m` base points
/// (the prefix) into `target`, or `None`.
pub(crate) fn find_mapping(chain: &StabChain, m: usize, target: &[bool]) -> Option<Permutation> {
    let id = Permutation::identity(chain.degree);
    find_from(chain, 0, m, &id, target)
}

/// Depth-first search below level `k` with the tail `suffix` already fixed:
/// candidates are `x = u_{k'} ... then suffix`.
fn find_from(
    chain: &StabChain,
    k: usize,
    m: usize,
    suffix: &Permutation,
    target: &[bool],
) -> Option<Permutation> {
    if k == m {
        return Some(suffix.clone());
    }
    let level = &chain.levels[k];
    for &q in &level.orbit {
        if !target[suffix.apply(q)] {
            continue;
        }
        let next = level.transversal[q].as_ref().unwrap().then(suffix);
        if let Some(x) = find_from(chain, k + 1, m, &next, target) {
            return Some(x);
        }
    }
    None
}

/// Generators of the set-wise stabilizer of the first `m` base points.
pub(crate) fn set_stabilizer_gens(chain: &StabChain, m: usize, set: &[bool]) -> Vec<Permutation> {
    let mut found = Vec::new();
    stab_rec(chain, 0, m, set, &mut found);
    found
}

fn stab_rec(chain: &StabChain, k: usize, m: usize, set: &[bool], found: &mut Vec<Permutation>) {
    if k == m {
        found.extend(chain.stabilizer_gens(m));
        return;
    }
    stab_rec(chain, k + 1, m, set, found);
    let level = &chain.levels[k];
    let mut covered = point_orbit(level.base, found, chain.degree);
    for &p in &level.orbit {
        if p == level.base || !set[p] || covered[p] {
            continue;
        }
        let u = level.transversal[p].as_ref().unwrap();
        if let Some(x) = find_from(chain, k + 1, m, u, set) {
            found.push(x);
            covered = point_orbit(level.base, found, chain.degree);
        }
    }
}

/// Membership mask of the orbit of `p` under `gens`.
pub(crate) fn point_orbit(p: usize, gens: &[Permutation], n: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[p] = true;
    let mut stack = vec![p];
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

/// Orbit partition of `0..n` under `gens`: `label[x]` is the smallest point
/// in the orbit of `x`.
pub(crate) fn orbit_labels(gens: &[Permutation], n: usize) -> Vec<usize> {
    let mut label = vec![usize::MAX; n];
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = start;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for g in gens {
                let y = g.apply(x);
                if label[y] == usize::MAX {
                    label[y] = start;
                    stack.push(y);
                }
            }
        }
    }
    label
}

/// Lexicographically least image of `s` under the group generated by `gens`.
///
/// Builds the image one smallest element at a time: at each step the
/// remaining group is the pointwise stabilizer of the prefix chosen so far.
pub(crate) fn minimal_image(gens: &[Permutation], n: usize, s: &FaceSet) -> FaceSet {
    let mut candidates: Vec<Vec<usize>> = vec![s.indices().to_vec()];
    let mut group: Vec<Permutation> = gens.to_vec();
    let mut prefix = Vec::new();
    for _ in 0..s.len() {
        let label = orbit_labels(&group, n);
        let m = candidates
            .iter()
            .flat_map(|c| c.iter().filter(|x| !prefix.contains(*x)).map(|&x| label[x]))
            .min()
            .unwrap();
        let chain = StabChain::build(n, &group, &[m]);
        let level = &chain.levels[0];
        let mut next: Vec<Vec<usize>> = Vec::new();
        for c in &candidates {
            for &x in c.iter().filter(|x| !prefix.contains(*x)) {
                if label[x] != m {
                    continue;
                }
                let inv = level.transversal_inv[x].as_ref().unwrap();
                let mut img: Vec<usize> = c.iter().map(|&y| inv.apply(y)).collect();
                img.sort_unstable();
                next.push(img);
            }
        }
        next.sort();
        next.dedup();
        candidates = next;
        prefix.push(m);
        group = chain.stabilizer_gens(1);
    }
    let mut best = candidates.into_iter().next().unwrap_or_default();
    best.sort_unstable();
    FaceSet::from_sorted(best)
}
