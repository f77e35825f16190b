use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("invalid index {nu} for dimension {n}")]
    InvalidIndex { n: usize, nu: usize },

    #[error("basis vector {index} is linearly dependent on its predecessors")]
    LinearDependence { index: usize },

    #[error("time frame is degenerate at {point:?}")]
    FrameDependence { point: Vec<f64> },

    #[error("form is not positive definite at {point:?}")]
    NotPositiveDefinite { point: Vec<f64> },

    #[error("warp function is not positive at {point:?} (value {value})")]
    NonPositiveWarp { point: Vec<f64>, value: f64 },

    #[error("point {point:?} lies outside the domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("vector is not future directed causal")]
    NotFutureCausal,

    #[error("no frame field pairs strictly negatively with a future causal vector")]
    NoStrictWitness,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid has {nodes} lattice points, cap is {cap}")]
    GridTooLarge { nodes: usize, cap: usize },

    #[error("no lattice point lies in the domain")]
    EmptyGraph,

    #[error("unknown node {0}")]
    UnknownNode(usize),

    #[error("point {point:?} does not snap to an in-domain lattice node")]
    NotOnGrid { point: Vec<f64> },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("region contains no causally related pairs")]
    NoCausalPairs,

    #[error("unknown suite {0:?}")]
    UnknownSuite(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
