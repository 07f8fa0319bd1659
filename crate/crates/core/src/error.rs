use alloc::string::String;
use thiserror::Error;

/// A rejected configuration value. `key` is the configuration key name as it
/// appears in config files.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid value for `{key}`: {reason}")]
pub struct ConfigError {
    pub key: &'static str,
    pub reason: String,
}

impl ConfigError {
    pub fn new(key: &'static str, reason: impl Into<String>) -> Self {
        Self {
            key,
            reason: reason.into(),
        }
    }
}

/// Structural problems with a mobility trace. `index` is the zero-based
/// sample index; file readers translate it into a line number.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("empty trace")]
    Empty,
    #[error("non-finite value at sample {index}")]
    NonFinite { index: usize },
    #[error("negative timestamp at sample {index}")]
    NegativeTime { index: usize },
    #[error("non-monotone timestamp at sample {index}")]
    NonMonotone { index: usize },
    #[error("negative speed at sample {index}")]
    NegativeSpeed { index: usize },
    #[error("invalid resampling step {dt} s")]
    InvalidStep { dt: f64 },
    #[error("resampling step {dt} s exceeds trace span {span} s")]
    StepExceedsSpan { dt: f64, span: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("empty series")]
    EmptySeries,
    #[error("undefined stability (zero mean)")]
    ZeroMean,
    #[error("no drops to aggregate")]
    NoDrops,
    #[error("series length mismatch ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("trace does not match configuration: {0}")]
    TraceMismatch(String),
}
