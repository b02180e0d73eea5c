use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scene: {}", .0.join("; "))]
    InvalidScene(Vec<String>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("non-finite sample at tick {tick}")]
    NonFinite { tick: u64 },

    #[error("insufficient decay: curve reaches {reached_db:.1} dB, need {needed_db:.1} dB")]
    InsufficientDecay { reached_db: f64, needed_db: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("audio error in {path}: {source}")]
    Audio {
        path: PathBuf,
        #[source]
        source: hound::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when the error stems from bad user input rather than a failure at runtime.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidScene(_) | Error::InvalidArgument(_) | Error::Config(_)
        )
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
