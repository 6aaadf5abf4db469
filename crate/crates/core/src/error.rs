use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("site {0} has no finite occupancy cap and nothing else bounds it")]
    UnboundedSite(usize),

    #[error("invalid correlations: {0}")]
    InvalidCorrelations(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("configuration space exceeds the limit of {limit} configurations")]
    Capacity { limit: usize },

    #[error("simplex iteration limit of {0} reached")]
    IterationLimit(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerically ambiguous verdict: {0}")]
    Ambiguous(String),
}
