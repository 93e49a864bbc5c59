use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch { context: &'static str, expected: usize, found: usize },
    #[error("generator {name} not unimodular")]
    NotUnimodular { name: String },
    #[error("form not positive definite (leading principal minor {minor} = {value})")]
    NotPositiveDefinite { minor: usize, value: String },
    #[error("group closure has {found} elements but order {declared} was declared")]
    GroupOrder { declared: usize, found: usize },
    #[error("group closure exceeded {bound} elements")]
    ClosureBound { bound: usize },
    #[error("orbit enumeration exceeded {limit} elements")]
    OrbitBound { limit: usize },
    #[error("cone is not contained in the closure of C: {0}")]
    NotInSupport(String),
    #[error("group action does not preserve the quadratic form")]
    FormNotInvariant,
    #[error("linearity domains of the lower hull disagree with the Delaunay cells: {0}")]
    LinearityMismatch(String),
    #[error("invalid data: {0}")]
    InvalidData(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
