use thiserror::Error;

/// Errors surfaced by the analytic and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    /// The computation left the representable range of `f64`. Large
    /// configurations should use the high-dimensional approximations.
    #[error("numeric range exceeded: {0}")]
    NumericRange(String),

    /// Requested a law that only exists on the other side of the phase
    /// transition (or exactly at it).
    #[error("regime error: {0}")]
    Regime(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
