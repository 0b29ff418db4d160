use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("index {index} out of range for {len} elements")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("cone is a linear subspace of dimension {0}; it has no facets")]
    DegenerateCone(usize),
    #[error("generators do not span the ambient space (rank {rank} < {dim})")]
    NotFullDimensional { rank: usize, dim: usize },
    #[error("face {0:?} is not a ridge of the given facet")]
    NotARidge(Vec<usize>),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("group is not a subgroup: generator {0} is not a member")]
    NotASubgroup(String),
    #[error("group does not act on the generators: {0}")]
    GroupAction(String),
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("invalid perturbation: {0}")]
    Perturbation(String),
    #[error("recursion depth {depth} exhausted on a subcone with {rays} rays in dimension {dim}")]
    RecursionDepth {
        depth: usize,
        rays: usize,
        dim: usize,
    },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
