use thiserror::Error;

/// Errors raised across the workbench.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("graph order {0} outside supported range 1..=16")]
    OrderOutOfRange(usize),

    #[error("invalid vertex pair ({i},{j}) for order {n}: need 1 <= i < j <= n")]
    InvalidPair { i: usize, j: usize, n: usize },

    #[error("vertex {vertex} out of range for order {order}")]
    VertexOutOfRange { vertex: usize, order: usize },

    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("vertex subset must be strictly increasing and non-empty")]
    BadSubset,

    #[error("pattern has no edges; objective would be positive for every coloring")]
    EdgelessPattern,

    #[error("pattern of order {0} too large for lookup tables (max 8)")]
    PatternTooLarge(usize),

    #[error("pattern order {pattern} exceeds coloring order {order}")]
    PatternExceedsOrder { pattern: usize, order: usize },

    #[error("exhaustive enumeration at order {order} exceeds the {budget} budget (max {max})")]
    BudgetExceeded {
        order: usize,
        budget: &'static str,
        max: usize,
    },

    #[error("witness list overflow: more than {0} witnesses")]
    WitnessOverflow(usize),

    #[error("delta cache is stale for this coloring")]
    StaleCache,

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("graph is not a tree of order {0}")]
    NotATree(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid checkpoint token: {0}")]
    BadCheckpoint(String),

    #[error("qubit count {0} exceeds the state-vector cap of 20")]
    TooManyQubits(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("table error: {0}")]
    Table(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
