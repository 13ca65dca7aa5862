use hml_core::HmlError;
use thiserror::Error;

/// Failures that prevent a report from being produced.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Family(#[from] HmlError),
    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("report encoding failed: {0}")]
    Encode(String),
}
