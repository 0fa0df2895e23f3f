use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("invalid scenario: {0}")]
    Validation(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Core(#[from] ppsm_core::Error),
}

impl CliError {
    /// 2 for input problems, 3 for numerical failures, 4 for protocol aborts.
    pub fn exit_code(&self) -> i32 {
        use ppsm_core::Error as E;
        match self {
            CliError::Parse { .. } | CliError::Validation(_) | CliError::Io { .. } => 2,
            CliError::Csv(_) => 2,
            CliError::Core(e) => match e {
                E::RegionMiss { .. } => 4,
                E::InvalidParameter(_) | E::DegeneratePointer { .. } | E::EmptyRegion(_) => 2,
                _ => 3,
            },
        }
    }
}
