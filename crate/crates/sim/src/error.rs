use std::fmt::Display;

use thiserror::Error;

/// Errors surfaced by the command-line front end, split by exit code.
#[derive(Debug, Error)]
pub enum SimError {
    /// Bad input: config, override, preset or trace. Exit code 1.
    #[error("{0}")]
    Config(String),
    /// Failure while running or writing results. Exit code 2.
    #[error("{0}")]
    Runtime(String),
}

impl SimError {
    pub fn config(key: &str, reason: impl Display) -> Self {
        SimError::Config(format!("invalid value for `{key}`: {reason}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) => 1,
            SimError::Runtime(_) => 2,
        }
    }
}

impl From<v2n_core::Error> for SimError {
    fn from(e: v2n_core::Error) -> Self {
        match e {
            v2n_core::Error::Metrics(_) => SimError::Runtime(e.to_string()),
            _ => SimError::Config(e.to_string()),
        }
    }
}

impl From<v2n_core::ConfigError> for SimError {
    fn from(e: v2n_core::ConfigError) -> Self {
        SimError::Config(e.to_string())
    }
}

impl From<std::io::Error> for SimError {
    fn from(e: std::io::Error) -> Self {
        SimError::Runtime(e.to_string())
    }
}
