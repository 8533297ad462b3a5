use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration at `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("unknown {what} `{name}`; expected one of: {expected}")]
    UnknownName {
        what: &'static str,
        name: String,
        expected: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A failure propagated from a shared computation.
    #[error("{0}")]
    Failed(String),

    #[error(transparent)]
    Core(#[from] qhalab::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Usage errors exit with status 2.
    pub fn is_usage(&self) -> bool {
        matches!(self, CliError::Config { .. } | CliError::UnknownName { .. })
    }
}
