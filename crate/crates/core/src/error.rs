use thiserror::Error;

/// Which margin of an adjacency matrix a [`Error::Margin`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Row,
    Column,
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::Row => write!(f, "row"),
            Axis::Column => write!(f, "column"),
        }
    }
}

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{axis} {index} sums to {sum}, expected {d}")]
    Margin {
        axis: Axis,
        index: usize,
        sum: i64,
        d: usize,
    },
    #[error("entry ({row}, {col}) is negative")]
    NegativeEntry { row: usize, col: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("graph is not simple")]
    NotSimple,
    #[error("switching {0} is not applicable: a removed edge is absent")]
    NotInDomain(String),
    #[error("graph is not of category k in [1, {max}]")]
    NotCategorized { max: usize },
    #[error("graph is simple (category 0)")]
    CategoryZero,
    #[error("graph is not in the s-neighbourhood")]
    NotInNeighborhood,
    #[error("state space too large to enumerate: estimated {estimate} > cap {cap}")]
    TooLargeToEnumerate { estimate: f64, cap: usize },
    #[error("tuple is not admissible: {0}")]
    NotAdmissible(String),
    #[error("degree sequences differ: {0}")]
    DegreeMismatch(String),
    #[error("common-neighbour hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("path construction failed: {0}")]
    Construction(String),
    #[error("precondition not met: {0}")]
    PreconditionNotMet(String),
    #[error("function takes a negative value, entropy undefined")]
    NegativeForEntropy,
    #[error("generator is not reversible: {0}")]
    NotReversible(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
