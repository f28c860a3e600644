//! Crate-wide error type.
//!
//! Every error maps to one of three categories so the CLI can translate
//! failures into stable exit codes: configuration problems, backend
//! (transport/protocol) problems, and data problems.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed record: {message}")]
    MalformedRecord {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: unknown label {label:?}")]
    UnknownLabel {
        path: String,
        line: usize,
        label: String,
    },

    #[error("empty dataset: {0}")]
    EmptyDataset(String),

    #[error("invalid document {id:?}: {message}")]
    InvalidDocument { id: String, message: String },

    #[error("duplicate document id {id:?} in dataset {dataset:?}")]
    DuplicateId { id: String, dataset: String },

    #[error("registry mismatch: dataset {dataset:?} was validated against a different registry")]
    RegistryMismatch { dataset: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("backend {name}: {message}")]
    Backend { name: String, message: String },

    #[error("backend {name}: protocol violation: {message}")]
    ProtocolViolation { name: String, message: String },

    #[error("backend {name}: retries exhausted after {attempts} attempts: {last}")]
    RetriesExhausted {
        name: String,
        attempts: u32,
        last: String,
    },
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Backend,
    Data,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Config => 1,
            ErrorCategory::Backend => 2,
            ErrorCategory::Data => 3,
        }
    }
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Config(_) => ErrorCategory::Config,
            Error::Backend { .. }
            | Error::ProtocolViolation { .. }
            | Error::RetriesExhausted { .. } => ErrorCategory::Backend,
            _ => ErrorCategory::Data,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
