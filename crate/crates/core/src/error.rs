use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "denominator is not positive definite after regularization (pivot {pivot} = {value:e})"
    )]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("projection matrix for mode {mode} is rank deficient")]
    RankDeficient { mode: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),

    #[error("size mismatch in {}: expected {expected} bytes, found {found}", .path.display())]
    SizeMismatch {
        path: PathBuf,
        expected: u64,
        found: u64,
    },

    #[error("{}:{line}: label {text:?} is not an integer", .path.display())]
    BadLabel {
        path: PathBuf,
        line: usize,
        text: String,
    },

    #[error("{}:{line}: label {label} outside 1..={n_classes}", .path.display())]
    LabelOutOfRange {
        path: PathBuf,
        line: usize,
        label: i64,
        n_classes: usize,
    },

    #[error("malformed manifest {}: {message}", .path.display())]
    Manifest { path: PathBuf, message: String },

    #[error("refusing to overwrite {} (use force)", .0.display())]
    AlreadyExists(PathBuf),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
