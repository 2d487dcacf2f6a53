use alloc::string::String;

use crate::series::Timestamp;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("timestamps not strictly increasing at index {index}")]
    UnorderedTimestamps { index: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("change-point at timestamp {timestamp} is not on the reconstruction grid")]
    InconsistentGrid { timestamp: Timestamp },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
