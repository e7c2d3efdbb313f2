use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("hypervector dimension must be at least 1")]
    ZeroDimension,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("cannot combine {left} with {right}")]
    RepresentationMismatch { left: &'static str, right: &'static str },

    #[error("similarity `{kind}` is not defined for {repr} hypervectors")]
    UnsupportedSimilarity { kind: &'static str, repr: &'static str },

    #[error("invalid value {value} for `{name}`: expected {expected}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        expected: &'static str,
    },

    #[error("class {0} has no training samples")]
    EmptyClass(usize),

    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("similarity profile sums to zero; `{0}` score is undefined")]
    ZeroProfileSum(&'static str),

    #[error("encoder expects {expected} input, got {found}")]
    FeatureKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("quantization grid has not been fitted")]
    UnfittedGrid,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path}: row {row}: {message}")]
    Row {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("checksum mismatch for {path}: expected {expected}, computed {actual}")]
    Checksum {
        path: PathBuf,
        expected: String,
        actual: String,
    },

    #[error("config `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("repetition {repetition} failed: {source}")]
    Repetition {
        repetition: usize,
        #[source]
        source: Box<Error>,
    },

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

    pub(crate) fn invalid(name: &'static str, value: impl ToString, expected: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value: value.to_string(),
            expected,
        }
    }
}
