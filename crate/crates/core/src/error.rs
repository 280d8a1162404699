use num_bigint::BigUint;
use thiserror::Error;

use crate::graph::EulerianReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid JSON graph: {0}")]
    Json(#[from] serde_json::Error),

    #[error("graph is not Eulerian: {0}")]
    NotEulerian(EulerianReport),

    #[error("{what} would need {count} steps, above the guard of {limit}")]
    GuardExceeded {
        what: &'static str,
        count: BigUint,
        limit: BigUint,
    },

    #[error("ensemble {ensemble} cannot be used with a {kind} graph")]
    EnsembleMismatch {
        ensemble: &'static str,
        kind: &'static str,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid planar map: {0}")]
    InvalidMap(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn guard(what: &'static str, count: impl Into<BigUint>, limit: u64) -> Self {
        Error::GuardExceeded {
            what,
            count: count.into(),
            limit: BigUint::from(limit),
        }
    }
}
