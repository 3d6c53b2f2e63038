use mprs_milp::{ModelError, SolveStatus, SolverError};
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {what} has length {got}, expected {expected}")]
    DimensionMismatch { what: &'static str, expected: usize, got: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid parameter domain: {0}")]
    InvalidOmega(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("{what} exceeds the enumeration guard of {limit}")]
    TooLarge { what: String, limit: usize },
    #[error("solver returned {status:?} while solving {context}")]
    UnexpectedStatus { context: &'static str, status: SolveStatus },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("the solution history is empty")]
    EmptyHistory,
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { what, expected, got })
    }
}
