use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("variable index {index} out of range ({num_vars} variables declared)")]
    IndexOutOfRange { index: usize, num_vars: usize },
    #[error("variable {var} is not binary")]
    NotBinary { var: usize },
    #[error("invalid bounds [{lo}, {hi}] for variable {var}")]
    InvalidBounds { var: usize, lo: f64, hi: f64 },
    #[error("non-finite value in {what}")]
    NonFinite { what: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("unknown solver backend `{0}`")]
    UnknownBackend(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}
