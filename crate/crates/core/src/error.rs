//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the data pipeline, model, and evaluation code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {context}: expected {expected}, got {got}")]
    ShapeMismatch {
        context: String,
        expected: String,
        got: String,
    },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("{modality} CSV has {found} feature columns, expected {expected}")]
    FeatureCountMismatch {
        modality: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("unparseable value {value:?} at row {row}, column {column:?}")]
    BadCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("timestamps not sorted: row {row} has {timestamp} after {previous}")]
    UnsortedTimestamps {
        row: usize,
        timestamp: f64,
        previous: f64,
    },

    #[error("feature {feature:?} ({modality}) has no observed values in the training split; cannot impute")]
    NoObservedValues {
        modality: &'static str,
        feature: String,
    },

    #[error("no statistics recorded for feature {feature:?} ({modality})")]
    MissingFeatureStats {
        modality: &'static str,
        feature: String,
    },

    #[error("sensor row at t={timestamp} has no label")]
    MissingLabel { timestamp: f64 },

    #[error("no aligned samples: every sensor row has fewer than {window} preceding network rows")]
    NoAlignedSamples { window: usize },

    #[error("chronological split with fraction {fraction} leaves the {side} side empty")]
    EmptySplit { fraction: f64, side: &'static str },

    #[error("non-finite loss at epoch {epoch}, batch {batch}: training aborted")]
    NanLoss { epoch: usize, batch: usize },

    #[error("checkpoint format version {found} is not supported (expected {expected})")]
    CheckpointVersion { expected: u32, found: u32 },

    #[error("checkpoint does not match expected configuration: {0}")]
    CheckpointMismatch(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },

    #[error("json error in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn json(path: &std::path::Path, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn csv(path: &std::path::Path, source: csv::Error) -> Self {
        Error::Csv {
            path: path.display().to_string(),
            source,
        }
    }
}
