//! Experiment harness around [`ftrlm_core`]: plain-text experiment configs,
//! a deterministic multi-seed runner with grid search, CSV emission, log-log
//! slope fitting, and the worst-case-construction sweep driver.

pub mod config;
pub mod csv_io;
pub mod runner;
pub mod slope;
pub mod sweep;

use std::path::PathBuf;

/// Harness-level failures; core validation errors pass through.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] ftrlm_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("slope undefined: {0}")]
    SlopeUndefined(String),
    #[error("{0}")]
    NoUsableRuns(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
