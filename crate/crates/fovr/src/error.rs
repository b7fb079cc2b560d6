//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a precondition (empty input, non-finite value,
    /// out-of-range parameter, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A text source could not be parsed. Carries the 1-based physical line
    /// number of the offending line.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Parsed data violated a structural invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A timestamp or index fell outside the covered span.
    #[error("out of range: {0}")]
    Range(String),

    /// A spherical mean was requested for directions that cancel out.
    #[error("degenerate spherical mean: resultant norm {0} is below threshold")]
    DegenerateMean(f64),

    /// An enumeration bound was exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
