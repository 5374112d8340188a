use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported length {0}: expected N = 2^n * 3^m with 2 <= N <= 32768")]
    UnsupportedLength(usize),

    #[error("invalid kernel ordering: {0}")]
    InvalidOrdering(String),

    #[error("ordering/product mismatch: ordering {ordering:?} has product {product}, expected {expected}")]
    OrderingMismatch {
        ordering: Vec<usize>,
        product: usize,
        expected: usize,
    },

    #[error("unknown kernel variant `{0}`")]
    UnknownVariant(String),

    #[error("unsupported kernel dimension {0}")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix size overflow: {0} exceeds the 32768 limit")]
    SizeOverflow(usize),

    #[error("value {0} outside [0, 1]")]
    OutOfRange(String),

    #[error("information length K = {k} out of range for N = {n}")]
    InvalidK { n: usize, k: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid bit string `{0}`")]
    BadBitString(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
