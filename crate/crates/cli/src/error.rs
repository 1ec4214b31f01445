use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Budget(String),

    /// An identity or representation residual exceeded its tolerance.
    #[error("{0}")]
    Breach(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Breach(_) => 1,
            CliError::Input(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Budget(_) => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<kleinian_core::Error> for CliError {
    fn from(e: kleinian_core::Error) -> Self {
        match e {
            kleinian_core::Error::BudgetExceeded { .. } => {
                CliError::Budget(format!("{e} (rerun with --allow-partial to keep the truncated result)"))
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
