//! Permutation groups: orbits, stabilizers, equivalence tests, canonical
//! representatives and double cosets.

mod chain;
mod perm;
mod search;

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::faceset::FaceSet;
use chain::StabChain;

pub use perm::Permutation;

/// Groups up to this order enumerate orbits to find canonical forms.
pub const ORBIT_ENUMERATION_LIMIT: u64 = 1_000;

/// A finite permutation group on `0..degree`.
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: OnceLock<StabChain>,
}

impl Clone for PermGroup {
    fn clone(&self) -> Self {
        let chain = OnceLock::new();
        if let Some(c) = self.chain.get() {
            let _ = chain.set(c.clone());
        }
        Self {
            degree: self.degree,
            generators: self.generators.clone(),
            chain,
        }
    }
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermGroup")
            .field("degree", &self.degree)
            .field("generators", &self.generators)
            .finish()
    }
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return Err(Error::InvalidPermutation(format!(
                "generator {g} has degree {}, expected {degree}",
                g.degree()
            )));
        }
        let mut gens: Vec<Permutation> = Vec::new();
        for g in generators {
            if !g.is_identity() && !gens.contains(&g) {
                gens.push(g);
            }
        }
        Ok(Self {
            degree,
            generators: gens,
            chain: OnceLock::new(),
        })
    }

    pub fn trivial(degree: usize) -> Self {
        Self::new(degree, Vec::new()).unwrap()
    }

    pub fn symmetric(degree: usize) -> Self {
        let mut gens = Vec::new();
        if degree >= 2 {
            gens.push(Permutation::from_cycles(degree, &[vec![0, 1]]).unwrap());
        }
        if degree >= 3 {
            gens.push(Permutation::from_cycles(degree, &[(0..degree).collect()]).unwrap());
        }
        Self::new(degree, gens).unwrap()
    }

    /// Parses generators in 1-based cycle or image-list notation.
    pub fn from_strings(degree: usize, gens: &[&str]) -> Result<Self> {
        let perms = gens
            .iter()
            .map(|s| Permutation::parse(s, degree))
            .collect::<Result<Vec<_>>>()?;
        Self::new(degree, perms)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    fn chain(&self) -> &StabChain {
        self.chain
            .get_or_init(|| StabChain::build(self.degree, &self.generators, &[]))
    }

    pub fn order(&self) -> BigUint {
        self.chain().order()
    }

    /// Base points of the cached stabilizer chain.
    pub fn base(&self) -> Vec<usize> {
        self.chain().base()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.chain().contains(g)
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.generators.iter().all(|g| other.contains(g))
    }

    /// All elements; intended for small groups and tests.
    pub fn elements(&self) -> Vec<Permutation> {
        self.chain().elements()
    }

    pub fn join(&self, other: &PermGroup) -> Result<PermGroup> {
        if self.degree != other.degree {
            return Err(Error::Dimension(format!(
                "cannot join groups of degree {} and {}",
                self.degree, other.degree
            )));
        }
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        PermGroup::new(self.degree, gens)
    }

    pub fn orbit_of_point(&self, p: usize) -> Vec<usize> {
        let mask = search::point_orbit(p, &self.generators, self.degree);
        (0..self.degree).filter(|&x| mask[x]).collect()
    }

    /// Point orbits, each sorted, ordered by smallest element.
    pub fn point_orbits(&self) -> Vec<Vec<usize>> {
        let label = search::orbit_labels(&self.generators, self.degree);
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut index = vec![usize::MAX; self.degree];
        for x in 0..self.degree {
            let l = label[x];
            if index[l] == usize::MAX {
                index[l] = out.len();
                out.push(Vec::new());
            }
            out[index[l]].push(x);
        }
        out
    }

    pub fn point_stabilizer(&self, p: usize) -> PermGroup {
        let chain = StabChain::build(self.degree, &self.generators, &[p]);
        PermGroup {
            degree: self.degree,
            generators: chain.stabilizer_gens(1),
            chain: OnceLock::new(),
        }
    }

    /// Full orbit of `s` under the set-wise action, sorted.
    pub fn orbit_of_set(&self, s: &FaceSet) -> Vec<FaceSet> {
        let mut seen: HashSet<FaceSet> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(s.clone());
        queue.push_back(s.clone());
        while let Some(x) = queue.pop_front() {
            for g in &self.generators {
                let y = g.apply_set(&x);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        let mut out: Vec<FaceSet> = seen.into_iter().collect();
        out.sort();
        out
    }

    /// `|G| / |Stab(G, s)|`.
    pub fn orbit_size(&self, s: &FaceSet) -> BigUint {
        self.order() / self.set_stabilizer(s).order()
    }

    pub fn set_stabilizer(&self, s: &FaceSet) -> PermGroup {
        if self.is_trivial() {
            return PermGroup::trivial(self.degree);
        }
        let s = if 2 * s.len() > self.degree {
            s.complement(self.degree)
        } else {
            s.clone()
        };
        let chain = StabChain::build(self.degree, &self.generators, s.indices());
        let gens = search::set_stabilizer_gens(&chain, s.len(), &s.mask(self.degree));
        PermGroup::new(self.degree, gens).unwrap()
    }

    /// Some element mapping `s` onto `t`, or `None`.
    pub fn representative_action(&self, s: &FaceSet, t: &FaceSet) -> Option<Permutation> {
        if s.len() != t.len() {
            return None;
        }
        if s == t {
            return Some(Permutation::identity(self.degree));
        }
        if self.is_trivial() {
            return None;
        }
        let (s, t) = if 2 * s.len() > self.degree {
            (s.complement(self.degree), t.complement(self.degree))
        } else {
            (s.clone(), t.clone())
        };
        let chain = StabChain::build(self.degree, &self.generators, s.indices());
        search::find_mapping(&chain, s.len(), &t.mask(self.degree))
    }

    /// Lexicographically least element of the orbit of `s`.
    pub fn canonical_representative(&self, s: &FaceSet) -> FaceSet {
        if self.is_trivial() || s.is_empty() {
            return s.clone();
        }
        let small = self
            .order()
            .to_u64()
            .is_some_and(|k| k <= ORBIT_ENUMERATION_LIMIT);
        if small {
            self.orbit_of_set(s).into_iter().next().unwrap()
        } else {
            search::minimal_image(&self.generators, self.degree, s)
        }
    }

    /// Canonical form by chain backtracking regardless of orbit size.
    pub fn minimal_image(&self, s: &FaceSet) -> FaceSet {
        search::minimal_image(&self.generators, self.degree, s)
    }

    /// One representative per `sub`-orbit inside the `self`-orbit of `f`.
    /// The first representative is `f` itself.
    pub fn double_coset_split(&self, sub: &PermGroup, f: &FaceSet) -> Result<Vec<FaceSet>> {
        if let Some(g) = sub.generators.iter().find(|g| !self.contains(g)) {
            return Err(Error::NotASubgroup(g.to_string()));
        }
        let total = self.orbit_size(f);
        let mut covered: HashSet<FaceSet> = HashSet::new();
        let mut reps = Vec::new();
        let mut seen: HashSet<FaceSet> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(f.clone());
        queue.push_back(f.clone());
        while let Some(x) = queue.pop_front() {
            if !covered.contains(&x) {
                for y in sub.orbit_of_set(&x) {
                    covered.insert(y);
                }
                reps.push(x.clone());
                if BigUint::from(covered.len()) == total {
                    break;
                }
            }
            for g in &self.generators {
                let y = g.apply_set(&x);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        Ok(reps)
    }

    /// The action on an invariant subset, renumbered to `0..points.len()`
    /// in the order given.
    pub fn induced_on(&self, points: &[usize]) -> Result<PermGroup> {
        let mut local = vec![usize::MAX; self.degree];
        for (i, &p) in points.iter().enumerate() {
            local[p] = i;
        }
        let mut gens = Vec::new();
        for g in &self.generators {
            let images = points
                .iter()
                .map(|&p| match local[g.apply(p)] {
                    usize::MAX => Err(Error::GroupAction(format!(
                        "{g} does not preserve the point subset"
                    ))),
                    i => Ok(i),
                })
                .collect::<Result<Vec<_>>>()?;
            gens.push(Permutation::from_images(images)?);
        }
        PermGroup::new(points.len(), gens)
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n).collect::<Vec<usize>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::from_images(v).unwrap())
    }

    fn group_strategy() -> impl Strategy<Value = PermGroup> {
        (3usize..=7).prop_flat_map(|n| {
            prop::collection::vec(perm_strategy(n), 0..3)
                .prop_map(move |gens| PermGroup::new(n, gens).unwrap())
        })
    }

    fn subset(n: usize, bits: u32) -> FaceSet {
        (0..n).filter(|i| bits >> i & 1 == 1).collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn chain_matches_enumeration(g in group_strategy(), bits in any::<u32>(), bits2 in any::<u32>()) {
            let n = g.degree();
            let mut elems: HashSet<Permutation> = HashSet::new();
            let mut queue = vec![Permutation::identity(n)];
            elems.insert(queue[0].clone());
            while let Some(x) = queue.pop() {
                for s in g.generators() {
                    let y = x.then(s);
                    if elems.insert(y.clone()) {
                        queue.push(y);
                    }
                }
            }
            prop_assert_eq!(g.order(), BigUint::from(elems.len()));
            let listed: HashSet<Permutation> = g.elements().into_iter().collect();
            prop_assert_eq!(&listed, &elems);

            let s = subset(n, bits);
            let t = subset(n, bits2);
            let orbit = g.orbit_of_set(&s);
            let stab = g.set_stabilizer(&s);
            let brute_stab = elems.iter().filter(|e| e.apply_set(&s) == s).count();
            prop_assert_eq!(stab.order(), BigUint::from(brute_stab));
            prop_assert!(stab.generators().iter().all(|x| x.apply_set(&s) == s && g.contains(x)));
            prop_assert_eq!(BigUint::from(orbit.len()) * stab.order(), g.order());

            let mapped = g.representative_action(&s, &t);
            let brute = elems.iter().any(|e| e.apply_set(&s) == t);
            prop_assert_eq!(mapped.is_some(), brute);
            if let Some(x) = mapped {
                prop_assert_eq!(x.apply_set(&s), t.clone());
            }
            let cs = g.canonical_representative(&s);
            prop_assert_eq!(&cs, &orbit[0]);
            prop_assert_eq!(g.minimal_image(&s), cs.clone());
            prop_assert_eq!(brute, cs == g.canonical_representative(&t));
        }

        #[test]
        fn double_cosets_partition(g in group_strategy(), pick in any::<u64>(), bits in any::<u32>()) {
            let n = g.degree();
            let elems = g.elements();
            let h = if elems.is_empty() { PermGroup::trivial(n) } else {
                let a = elems[(pick as usize) % elems.len()].clone();
                PermGroup::new(n, vec![a]).unwrap()
            };
            let f = subset(n, bits);
            let reps = g.double_coset_split(&h, &f).unwrap();
            let mut union: Vec<FaceSet> = Vec::new();
            for r in &reps {
                union.extend(h.orbit_of_set(r));
            }
            let total = union.len();
            union.sort();
            union.dedup();
            prop_assert_eq!(total, union.len());
            prop_assert_eq!(union, g.orbit_of_set(&f));
        }
    }
}
