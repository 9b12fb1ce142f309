use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state {state} out of range (state count {count})")]
    UnknownState { state: usize, count: usize },

    #[error("action {action} out of range (action count {count})")]
    UnknownAction { action: usize, count: usize },

    #[error("state {0} is terminal")]
    TerminalState(usize),

    #[error("no path from start to goal")]
    NoPath,

    #[error("return enumeration exceeded budget of {0} trajectories")]
    EnumerationBudget(usize),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("Q-function returned non-finite value {value} for action {action:?}")]
    NonFinite { action: Vec<f64>, value: f64 },

    #[error("schedule configuration error: {0}")]
    Schedule(String),

    #[error("malformed grid: {0}")]
    Grid(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("evaluation grids differ between arms: {0}")]
    GridMismatch(String),

    #[error("no SI snapshot at or before step {0}")]
    NoSnapshot(u64),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
