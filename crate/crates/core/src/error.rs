use thiserror::Error;

/// Errors surfaced by the library and mapped onto CLI exit codes and FFI status codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("eigenvalue solver failed: {0}")]
    Solver(String),
    #[error("entry distribution moments unknown: {0}")]
    UnknownMoments(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub(crate) fn budget(msg: impl Into<String>) -> Self {
        Error::BudgetExceeded(msg.into())
    }
}
