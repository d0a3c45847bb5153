use thiserror::Error;

/// Errors raised by the bound computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnackError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("point {point:?} is not interior to the domain")]
    NotInterior { point: Vec<f64> },

    #[error("point set is empty")]
    EmptySet,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("pair separation q = {q} is not below 1: no single-link certificate")]
    SeparationTooLarge { q: f64 },

    #[error("link {index} has separation {q} >= 1")]
    BadLink { index: usize, q: f64 },

    #[error("set separation q = {q} is not below 1: no set certificate")]
    SetSeparationTooLarge { q: f64 },

    #[error("set not compactly contained: entropy is infinite")]
    InfiniteEntropy,

    #[error("C must strictly exceed the entropy estimate ({estimate})")]
    ChainConstantTooSmall { estimate: f64 },

    #[error("pair missing from the entropy estimate")]
    PairMissing,

    #[error("grid solver supports dimensions 2 and 3 only (got {dim}); hull bounds remain available")]
    GridDimensionUnsupported { dim: usize },

    #[error("grid too fine: {nodes} nodes exceeds the limit of {limit}")]
    GridTooLarge { nodes: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, HarnackError>;
