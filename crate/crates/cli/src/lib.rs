//! Experiment runner: declarative TOML configs in, CSV tables and snapshots
//! out.

pub mod config;
pub mod output;
pub mod run;
pub mod scenario;

use thiserror::Error;

use crate::scenario::Fields;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {message}")]
    Numerical {
        message: String,
        snapshot: Option<Fields>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical { .. } => 3,
            _ => 2,
        }
    }
}

impl From<laguerre_dg::Error> for CliError {
    fn from(e: laguerre_dg::Error) -> Self {
        use laguerre_dg::Error as E;
        match e {
            E::IndexOutOfRange { .. }
            | E::Domain { .. }
            | E::InvalidParameter(_)
            | E::Configuration(_)
            | E::Unsupported(_)
            | E::DimensionMismatch { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numerical {
                message: e.to_string(),
                snapshot: None,
            },
        }
    }
}
