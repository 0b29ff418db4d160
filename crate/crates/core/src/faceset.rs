use std::fmt;

/// A set of generator indices, stored strictly increasing.
///
/// Indices are 0-based internally; file formats print them 1-based.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceSet(Vec<usize>);

impl FaceSet {
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self(indices)
    }

    /// Wraps an already sorted, duplicate-free vector.
    pub fn from_sorted(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self(indices)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn full(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn into_indices(self) -> Vec<usize> {
        self.0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn is_subset(&self, other: &FaceSet) -> bool {
        let mut it = other.0.iter();
        self.0.iter().all(|x| it.by_ref().any(|y| y == x))
    }

    pub fn intersection(&self, other: &FaceSet) -> FaceSet {
        FaceSet(
            self.0
                .iter()
                .copied()
                .filter(|&x| other.contains(x))
                .collect(),
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    /// Membership mask over `0..n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &i in &self.0 {
            m[i] = true;
        }
        m
    }

    pub fn complement(&self, n: usize) -> FaceSet {
        let m = self.mask(n);
        FaceSet((0..n).filter(|&i| !m[i]).collect())
    }

    /// Maps indices through `map` (e.g. local to global numbering).
    pub fn map_through(&self, map: &[usize]) -> FaceSet {
        FaceSet::new(self.0.iter().map(|&i| map[i]).collect())
    }

    /// Inverse of [`map_through`](Self::map_through): positions in `map`
    /// of the members, assuming every member occurs in `map`.
    pub fn localize(&self, map: &[usize]) -> FaceSet {
        FaceSet::new(
            self.0
                .iter()
                .map(|i| {
                    map.iter()
                        .position(|m| m == i)
                        .expect("index not in local map")
                })
                .collect(),
        )
    }

    /// 1-based rendering, space separated.
    pub fn to_one_based_string(&self) -> String {
        self.0
            .iter()
            .map(|i| (i + 1).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Debug for FaceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.to_one_based_string())
    }
}

impl FromIterator<usize> for FaceSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        FaceSet::new(iter.into_iter().collect())
    }
}

impl From<Vec<usize>> for FaceSet {
    fn from(v: Vec<usize>) -> Self {
        FaceSet::new(v)
    }
}
