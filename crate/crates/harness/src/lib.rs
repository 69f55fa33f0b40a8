//! Batch runner, transcript storage, metrics and reports for the
//! Connections solvers, plus the `connections` command line.

pub mod cli;
pub mod config;
pub mod live;
pub mod metrics;
pub mod report;
pub mod runner;
pub mod synthetic;

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("dataset {path}: {message}")]
    Dataset { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("transcript {path}: {message}")]
    Transcript { path: PathBuf, message: String },
    #[error("transcript for puzzle {0} has no matching dataset entry")]
    UnknownPuzzleId(u32),
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> HarnessError {
        let path = path.into();
        move |source| HarnessError::Io { path, source }
    }
}
