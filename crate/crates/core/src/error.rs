use std::path::PathBuf;

use thiserror::Error;

use crate::decision::Checkpoint;
use crate::planner::DualBands;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {field}: {message}")]
    InvalidInput { field: String, message: String },

    #[error("point outside world: ({x}, {y})")]
    OutsideWorld { x: f64, y: f64 },

    #[error("unreachable goal")]
    UnreachableGoal,

    #[error("unsynchronized bands")]
    UnsynchronizedBands,

    /// Carries the best bands found so callers can still inspect them.
    #[error("planning failed: {reason}")]
    PlanningFailed { reason: String, bands: Box<DualBands> },

    #[error("no observations")]
    NoObservations,

    #[error("checkpoint already fired: {0:?}")]
    CheckpointAlreadyFired(Checkpoint),

    #[error("pipeline order violation: {0}")]
    PipelineOrder(&'static str),

    #[error("no dock wall")]
    NoDockWall,

    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("trace parse error at line {line}: {message}")]
    TraceParse { line: usize, message: String },

    #[error("missing CA series {}: run `coopnav suite` first", .0.display())]
    MissingCaSeries(PathBuf),

    #[error("i/o error on {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidInput {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
