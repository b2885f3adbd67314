use thiserror::Error;

use crate::boole::SignPattern;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,
    #[error("invalid outcome: {0}")]
    InvalidOutcome(String),
    #[error("empty group {0}")]
    EmptyGroup(&'static str),
    #[error("non-contiguous runs: expected alpha {expected}, found {found}")]
    NonContiguousRuns { expected: usize, found: usize },
    #[error("run filed under group {expected} carries group {found}")]
    GroupMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("incomplete timestamps")]
    IncompleteTimestamps,
    #[error("timestamps out of order: {first} > {second}")]
    UnorderedTimestamps { first: f64, second: f64 },
    #[error("correlation out of range: {0}")]
    CorrelationOutOfRange(String),
    #[error("targets violate the {0} facet")]
    Infeasible(SignPattern),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
