use std::path::Path;

use thiserror::Error;

/// Command failures, each mapped to a stable process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn data(e: impl std::fmt::Display) -> Self {
        CliError::Data(e.to_string())
    }
}
