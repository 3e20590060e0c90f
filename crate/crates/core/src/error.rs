use thiserror::Error;

use crate::model::Point;

/// Errors raised across the library. The CLI maps each variant onto an exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid instance: {0}")]
    Validation(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("enumeration limit exceeded: {estimated} candidates required, limit is {limit}")]
    ResourceLimit { estimated: u128, limit: u64 },

    #[error("inequality is not valid for PS; violated at {witness:?}")]
    NotValid { witness: Point },

    #[error("no points")]
    NoPoints,

    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("variable ({group},{slot}) is out of range for this instance")]
    VarOutOfRange { group: usize, slot: usize },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn precondition(message: impl Into<String>) -> Self {
        Error::Precondition(message.into())
    }
}
