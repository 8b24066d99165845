use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the seqhop engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("cannot normalize a zero-norm vector")]
    ZeroNorm,

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("index {index} out of range for {len} patterns")]
    Index { index: usize, len: usize },

    #[error("all kernel weights are zero")]
    DegenerateWeights,

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("numerical failure at iteration {iteration}: {reason}")]
    Numerics {
        iteration: usize,
        reason: String,
        /// Frame index when raised inside sequential retrieval.
        frame: Option<usize>,
    },

    #[error("no crossing of G(lambda_f) = lambda_f in [{lo}, {hi}] for lambda = {lambda}")]
    NoCrossing { lambda: f64, lo: f64, hi: f64 },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("{path}: format error at byte {offset}: {reason}")]
    Format {
        path: PathBuf,
        offset: usize,
        reason: String,
    },

    #[error("{path}: shape {found} does not match {expected}")]
    ShapeMismatch {
        path: PathBuf,
        expected: String,
        found: String,
    },

    #[error("window p={p}, n={n} exceeds the {available} available frames")]
    Window {
        p: usize,
        n: usize,
        available: usize,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
