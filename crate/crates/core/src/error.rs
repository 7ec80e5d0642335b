use thiserror::Error;

use crate::expr::ParseError;

/// Errors produced by the expansion machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Caller-supplied parameters violate an operation's preconditions.
    #[error("validation error: {0}")]
    Validation(String),
    /// A function was evaluated (or differentiated) outside its domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Function text could not be parsed.
    #[error(transparent)]
    Parse(#[from] ParseError),
    /// A numerical diagnostic could not be formed from the available data.
    #[error("diagnostic error: {0}")]
    Diagnostic(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
