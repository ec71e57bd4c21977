use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read config {path}: {source}")]
    ReadConfig { path: PathBuf, source: std::io::Error },

    #[error("invalid config: {0}")]
    ParseConfig(serde_json::Error),

    #[error("config field `{0}` is required by this command")]
    Missing(&'static str),

    #[error(transparent)]
    Core(#[from] nnapprox::Error),

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ReadConfig { .. } | CliError::ParseConfig(_) => 1,
            CliError::Missing(_) => 2,
            CliError::Core(nnapprox::Error::Io(_) | nnapprox::Error::Json(_)) => 1,
            CliError::Core(_) => 2,
            CliError::Write { .. } | CliError::Csv(_) | CliError::Json(_) => 1,
        }
    }
}
