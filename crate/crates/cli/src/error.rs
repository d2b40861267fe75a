use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] chebdir_core::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// Process exit code: 4 for configuration problems, 3 for everything
    /// that failed while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 4,
            CliError::Core(_) | CliError::Io { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
