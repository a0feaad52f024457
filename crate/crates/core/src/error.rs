use std::path::PathBuf;

use thiserror::Error;

use crate::gamp::GampDiagnostics;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, got {actual} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("index {index} out of range 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("invalid one-bit sample at index {0}: real and imaginary parts must be +1 or -1")]
    InvalidOneBit(usize),

    #[error("degenerate estimate: {0}")]
    Degenerate(&'static str),

    #[error("lifted dimension {requested} exceeds the budget of {budget} entries")]
    BudgetExceeded { requested: usize, budget: usize },

    #[error("GAMP diverged after {} iterations", .0.iterations)]
    Diverged(Box<GampDiagnostics>),

    #[error("failed to parse config {path}: {message}")]
    ConfigParse { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
