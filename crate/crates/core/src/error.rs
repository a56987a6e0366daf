use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("eigensolver did not converge in sector n_up = {n_up}")]
    NoConvergence { n_up: usize },

    #[error("eigenpair residual {residual:e} exceeds tolerance in sector n_up = {n_up}")]
    Residual { n_up: usize, residual: f64 },

    #[error("dense oracle is limited to L <= 8, got L = {0}")]
    OracleTooLarge(usize),

    #[error("correlation K = {0} is outside the positivity window [-3, 1]")]
    Positivity(f64),

    #[error("density matrix is not a valid state: {0}")]
    InvalidState(String),

    #[error("no sign change of {what} in [{lo}, {hi}]")]
    NoBracket { what: &'static str, lo: f64, hi: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("validation failed: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field,
            reason: reason.into(),
        }
    }
}
