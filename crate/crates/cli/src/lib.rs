//! Scenario runner and command-line front end.
//!
//! [`runs`] turns a [`config::ScenarioConfig`] into a [`runs::RunRecord`];
//! [`cli`] parses arguments, writes files and maps failures to exit codes.

pub mod cli;
pub mod config;
pub mod format;
pub mod runs;

use std::path::{Path, PathBuf};

pub use config::{ConfigError, ScenarioConfig};
pub use runs::{energy_cost, RunRecord};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("numerical failure: {0}")]
    Numerical(qgrape_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 1 for anything the user can fix in the input, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 2,
            _ => 1,
        }
    }
}

impl From<qgrape_core::Error> for CliError {
    fn from(e: qgrape_core::Error) -> Self {
        match e {
            qgrape_core::Error::Validation(msg) => CliError::Input(msg),
            other => CliError::Numerical(other),
        }
    }
}
