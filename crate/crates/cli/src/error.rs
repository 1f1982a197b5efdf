use std::path::PathBuf;

use admlab_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn class(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.class(),
            CliError::Config(_) => "ConfigError",
            CliError::Io { .. } => "IoError",
        }
    }

    /// 2 for bad input, 3 for divergence or a missing stability bracket, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 1,
            CliError::Core(e) => match e {
                Error::Divergence { .. } | Error::NoBracket { .. } => 3,
                Error::InvalidParameter(_)
                | Error::InvalidDelay(_)
                | Error::InvalidFrequency(_)
                | Error::DelayNotMultiple { .. }
                | Error::NotProper { .. }
                | Error::ZeroDenominator
                | Error::DegreeOverflow { .. } => 2,
                _ => 1,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
