use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An argument outside the domain of a mathematical function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical failure at index {index}: {reason}")]
    NumericalFailure { index: usize, reason: String },

    /// A quantity that is not defined for the given input (e.g. 0/0 ratios).
    #[error("undefined value: {0}")]
    UndefinedValue(String),

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
