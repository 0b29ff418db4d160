use super::perm::Permutation;

/// One level of a stabilizer chain: the group `G^(i)` fixing all earlier
/// base points, its orbit of `base`, and a transversal.
#[derive(Clone, Debug)]
pub(crate) struct Level {
    pub base: usize,
    /// Strong generators fixing every earlier base point.
    pub gens: Vec<Permutation>,
    pub orbit: Vec<usize>,
    /// `transversal[p]` maps `base` to `p`, for `p` in the orbit.
    pub transversal: Vec<Option<Permutation>>,
    pub transversal_inv: Vec<Option<Permutation>>,
    /// Per orbit position: generators already applied to extend the orbit.
    closed: Vec<usize>,
    /// Per orbit position: generators whose Schreier generator was sifted.
    tested: Vec<usize>,
}

impl Level {
    fn new(base: usize, degree: usize) -> Self {
        let mut transversal = vec![None; degree];
        let mut transversal_inv = vec![None; degree];
        transversal[base] = Some(Permutation::identity(degree));
        transversal_inv[base] = Some(Permutation::identity(degree));
        Self {
            base,
            gens: Vec::new(),
            orbit: vec![base],
            transversal,
            transversal_inv,
            closed: vec![0],
            tested: vec![0],
        }
    }

    /// Closes the orbit under the current generators. Existing transversal
    /// entries never change, so earlier Schreier tests stay valid.
    fn extend_orbit(&mut self) {
        let mut idx = 0;
        while idx < self.orbit.len() {
            let p = self.orbit[idx];
            while self.closed[idx] < self.gens.len() {
                let s = &self.gens[self.closed[idx]];
                let q = s.apply(p);
                if self.transversal[q].is_none() {
                    let u = self.transversal[p].as_ref().unwrap().then(s);
                    self.transversal_inv[q] = Some(u.inverse());
                    self.transversal[q] = Some(u);
                    self.orbit.push(q);
                    self.closed.push(0);
                    self.tested.push(0);
                }
                self.closed[idx] += 1;
            }
            idx += 1;
        }
    }

    /// Next untested Schreier generator, if any.
    fn next_schreier(&mut self) -> Option<Permutation> {
        for idx in 0..self.orbit.len() {
            while self.tested[idx] < self.gens.len() {
                let p = self.orbit[idx];
                let s = &self.gens[self.tested[idx]];
                self.tested[idx] += 1;
                let q = s.apply(p);
                let h = self.transversal[p]
                    .as_ref()
                    .unwrap()
                    .then(s)
                    .then(self.transversal_inv[q].as_ref().unwrap());
                if !h.is_identity() {
                    return Some(h);
                }
            }
        }
        None
    }
}

/// Base and strong generating set built by deterministic Schreier–Sims.
#[derive(Clone, Debug)]
pub(crate) struct StabChain {
    pub degree: usize,
    pub levels: Vec<Level>,
}

impl StabChain {
    /// Builds a chain whose base starts with `prefix`.
    pub fn build(degree: usize, gens: &[Permutation], prefix: &[usize]) -> Self {
        let mut chain = StabChain {
            degree,
            levels: prefix.iter().map(|&b| Level::new(b, degree)).collect(),
        };
        for g in gens.iter().filter(|g| !g.is_identity()) {
            let fixes_base = chain.levels.iter().all(|l| g.apply(l.base) == l.base);
            if fixes_base {
                let b = g.moved_points().next().unwrap();
                chain.levels.push(Level::new(b, degree));
            }
            chain.add_strong(g, chain.levels.len() - 1);
        }
        let mut i = chain.levels.len();
        while i > 0 {
            let level = i - 1;
            match chain.levels[level].next_schreier() {
                None => i -= 1,
                Some(h) => {
                    let (res, j) = chain.sift(h, level + 1);
                    if res.is_identity() {
                        continue;
                    }
                    if j == chain.levels.len() {
                        let b = res.moved_points().next().unwrap();
                        chain.levels.push(Level::new(b, degree));
                    }
                    chain.add_strong(&res, j);
                    i = j + 1;
                }
            }
        }
        chain
    }

    /// Adds a strong generator to every level up to `upto` whose earlier
    /// base points it fixes.
    fn add_strong(&mut self, g: &Permutation, upto: usize) {
        for l in 0..=upto {
            if self.levels[..l].iter().all(|x| g.apply(x.base) == x.base) {
                self.levels[l].gens.push(g.clone());
                self.levels[l].extend_orbit();
            }
        }
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    /// Sifts `g` starting at level `start`; returns the residue and the
    /// level at which sifting stopped.
    pub fn sift(&self, mut g: Permutation, start: usize) -> (Permutation, usize) {
        for (k, level) in self.levels.iter().enumerate().skip(start) {
            let p = g.apply(level.base);
            match &level.transversal_inv[p] {
                Some(inv) => g = g.then(inv),
                None => return (g, k),
            }
        }
        let k = self.levels.len();
        (g, k)
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && self.sift(g.clone(), 0).0.is_identity()
    }

    pub fn order(&self) -> num_bigint::BigUint {
        self.levels
            .iter()
            .fold(num_bigint::BigUint::from(1u32), |acc, l| {
                acc * l.orbit.len()
            })
    }

    /// Generators of the pointwise stabilizer of the first `k` base points.
    pub fn stabilizer_gens(&self, k: usize) -> Vec<Permutation> {
        self.levels
            .get(k)
            .map(|l| l.gens.clone())
            .unwrap_or_default()
    }

    /// Every element, by iterating transversal products.
    pub fn elements(&self) -> Vec<Permutation> {
        let mut out = vec![Permutation::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for &p in &level.orbit {
                let u = level.transversal[p].as_ref().unwrap();
                for e in &out {
                    next.push(e.then(u));
                }
            }
            out = next;
        }
        out
    }
}
