use thiserror::Error;

/// Errors surfaced by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} exceeds cap ({found} > {limit})")]
    Cap { what: String, limit: usize, found: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search inconclusive: {0}")]
    Inconclusive(String),

    #[error("verification mismatch: {0}")]
    Verification(String),

    #[error("oracle fault: {0}")]
    OracleFault(String),

    #[error("internal layout error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { location: location.into(), message: message.into() }
    }

    pub(crate) fn cap(what: impl Into<String>, limit: usize, found: usize) -> Self {
        Error::Cap { what: what.into(), limit, found }
    }
}
