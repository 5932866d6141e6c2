use std::path::PathBuf;

/// Errors that stop a run before a report is produced. All map to exit
/// status 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// `--help` or `--version` text; not a failure.
    #[error("{0}")]
    Help(String),
    #[error("{0}")]
    Core(#[from] kober_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;
