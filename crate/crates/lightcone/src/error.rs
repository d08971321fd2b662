use std::path::Path;

use thiserror::Error;

/// Command failure, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or unreadable input files; exit 2.
    #[error("{0}")]
    Usage(String),
    /// The inputs are well-formed but outside what the library accepts; exit 1.
    #[error(transparent)]
    Domain(#[from] lightcone_core::Error),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Io(_) => 1,
        }
    }
}
