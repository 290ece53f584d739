use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: {key} already set on line {first}")]
    Duplicate { line: usize, key: String, first: usize },

    #[error("line {line}: bad value for {key}: {msg}")]
    Value { line: usize, key: String, msg: String },

    #[error("missing required key {0}")]
    Missing(String),

    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Model(#[from] mmrelay_core::Error),

    #[error("unknown figure {0:?}")]
    UnknownFigure(String),

    #[error("{0}")]
    Usage(String),
}

impl HarnessError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Usage(_) | HarnessError::UnknownFigure(_) => 2,
            _ => 1,
        }
    }
}
