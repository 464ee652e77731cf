use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Config { path: PathBuf, source: toml::de::Error },
    #[error(transparent)]
    Engine(#[from] natcalc::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Engine(natcalc::Error::BudgetExceeded { .. }) => 2,
            CliError::Engine(natcalc::Error::IncompleteStates { .. }) => 4,
            _ => 1,
        }
    }
}
