//! Error type shared across the library.

use thiserror::Error;

/// Broad failure category, used by callers (e.g. the CLI) to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Invalid configuration, formula text, or API misuse.
    Config,
    /// Invalid or inconsistent input data.
    Data,
    /// Numerical failure during training or evaluation.
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed formula: {0}")]
    MalformedFormula(String),

    #[error("formula over {vars} variables exceeds the {cap}-variable cap for {operation}")]
    SizeLimit {
        operation: &'static str,
        vars: usize,
        cap: usize,
    },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("unknown concept name `{0}`")]
    UnknownConcept(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        actual: String,
    },

    #[error("data error at row {row}, column {column}: {message}")]
    Data {
        row: usize,
        column: String,
        message: String,
    },

    #[error("non-finite loss at epoch {epoch} (layer {layer}): {message}")]
    Numeric {
        epoch: usize,
        layer: usize,
        message: String,
    },

    #[error("unsupported architecture: {0}")]
    UnsupportedArchitecture(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Numeric { .. } => ErrorKind::Numeric,
            Error::Data { .. } | Error::Io(_) | Error::Csv(_) => ErrorKind::Data,
            _ => ErrorKind::Config,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
