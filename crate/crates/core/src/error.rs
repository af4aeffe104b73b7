use thiserror::Error;

/// Errors returned by the rank-verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("invalid observation: {0}")]
    InvalidObservation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The truncated support of a conditional law holds no mass.
    #[error("degenerate conditional law: {0}")]
    DegenerateLaw(String),

    #[error("value {value} is outside the support of the conditional law")]
    OutsideSupport { value: f64 },

    /// Exhaustive enumeration refused because the outcome space is too large.
    #[error("outcome space of about {estimate:.3e} points exceeds the limit of {limit:.0e}")]
    TooLarge { estimate: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
