//! CLI error type and its process exit-code mapping.

use std::process::ExitCode;

use thiserror::Error;

/// Anything the CLI can fail with, split by exit code: configuration and
/// input problems exit with 2, mathematical/solver failures with 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("failed to load game: {0}")]
    GameLoad(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("solver error: {0}")]
    Solver(#[from] stackrobust::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) | CliError::GameLoad(_) | CliError::Io { .. } => {
                ExitCode::from(2)
            }
            CliError::Solver(_) => ExitCode::from(3),
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
