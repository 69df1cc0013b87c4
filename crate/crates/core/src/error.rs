use std::path::PathBuf;

use thiserror::Error;

use crate::automaton::ControlMode;

#[derive(Debug, Error)]
pub enum Error {
    #[error("robot at ({x:.3}, {y:.3}) overlaps scenario geometry")]
    RobotInCollision { x: f64, y: f64 },

    #[error("invalid task: {0}")]
    InvalidTask(String),

    #[error("an attention window needs a goal")]
    NoGoal,

    #[error("{0:?} states cannot be split")]
    NotSplittable(ControlMode),

    #[error("reset is undefined after a collision")]
    UndefinedReset,

    #[error("state cap of {0} reached before the goal")]
    StateSpaceExhausted(usize),

    #[error("no collision-free plan in the cognitive map")]
    NoPlan,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.into(),
            source,
        }
    }
}
