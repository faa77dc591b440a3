use std::path::PathBuf;

use thiserror::Error;
use tidal_econ::EconError;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config or data files.
    #[error("{0}")]
    Input(String),

    /// A computation that should have succeeded did not.
    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io { .. } => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

impl From<EconError> for CliError {
    fn from(e: EconError) -> Self {
        match e {
            EconError::ZeroDiscountedEnergy
            | EconError::NoPayback
            | EconError::IrrUndefined
            | EconError::NoIrrInRange { .. }
            | EconError::ZeroDenominator(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
