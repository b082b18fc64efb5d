//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric routine could not reach the requested accuracy. Carries the
    /// best value obtained and an estimate of its absolute error.
    #[error("accuracy: {context}: best value {partial:e} with error bound {bound:e}")]
    Accuracy {
        context: &'static str,
        partial: f64,
        bound: f64,
    },

    /// Arguments outside the supported domain.
    #[error("domain: {0}")]
    Domain(String),

    /// Invalid observation data (the index refers to the offending entry).
    #[error("data: {msg} (index {index})")]
    DataAt { msg: String, index: usize },

    /// Invalid observation data without a specific offending entry.
    #[error("data: {0}")]
    Data(String),

    /// A file could not be parsed; `line` is 1-based.
    #[error("parse: line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
