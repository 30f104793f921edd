//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed line: {msg}")]
    MalformedLine {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("graph is empty")]
    EmptyGraph,

    #[error("node id {id} out of range (n = {n})")]
    NodeOutOfRange { id: u32, n: usize },

    #[error("seed node {id} has degree 0")]
    ZeroDegreeSeed { id: u32 },

    #[error("queried-node fraction must lie in (0, 1], got {0}")]
    InvalidFraction(f64),

    #[error("invalid parameter {name}: {msg}")]
    InvalidParameter { name: &'static str, msg: String },

    #[error("sampling list is empty or malformed: {0}")]
    InvalidSamplingList(String),

    #[error("walk of length {r} is too short for collision threshold M = {m} (need r >= 2M + 2)")]
    WalkTooShort { r: usize, m: usize },

    #[error(
        "insufficient collisions in the walk to estimate the number of nodes; lengthen the walk"
    )]
    InsufficientCollisions,

    #[error(
        "power iteration did not converge after {iterations} iterations (last estimate {last})"
    )]
    NonConvergence { iterations: usize, last: f64 },

    #[error("malformed estimates document: {0}")]
    InvalidEstimates(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
