use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad command line, unknown experiment or unknown parameter.
    #[error("{0}")]
    Usage(String),

    #[error("invalid value for `{key}`: {message}")]
    Value { key: String, message: String },

    #[error(transparent)]
    Core(#[from] contilab_core::Error),

    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("every cell of `{0}` failed")]
    AllCellsFailed(String),
}

impl HarnessError {
    pub fn value(key: &str, message: impl Into<String>) -> Self {
        HarnessError::Value { key: key.to_string(), message: message.into() }
    }

    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) | HarnessError::Value { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
