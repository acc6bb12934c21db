use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("matrix has no nonzero entries")]
    ZeroMatrix,
    #[error("no triangle with all three edges present")]
    NoTriangles,
    #[error("dimension {n} exceeds the dense limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
