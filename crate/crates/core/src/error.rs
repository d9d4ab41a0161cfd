use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("dataset must contain at least one sample")]
    EmptyDataset,

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("stepsize {eta} violates the filter bound: eta * s_max^2 = {product} > 1")]
    Stepsize { eta: f64, product: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("gradient descent diverged at iteration {iteration}")]
    Divergence { iteration: u64 },

    #[error("non-positive values at indices {indices:?}")]
    Domain { indices: Vec<usize> },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("missing column `{name}` (available: {})", available.join(", "))]
    MissingColumn { name: String, available: Vec<String> },

    #[error("cell N={train_size} (grid index {size_index}, seed index {seed_index}) failed: {source}")]
    Cell {
        train_size: usize,
        size_index: usize,
        seed_index: usize,
        #[source]
        source: Box<Error>,
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
}
