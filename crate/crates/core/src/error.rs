use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the library. Every variant is a data or contract error;
/// usage errors live in the CLI layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("I/O error: {0}")]
    Stream(#[from] io::Error),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("no training pairs")]
    NoTrainingPairs,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch at line {line}: expected {expected}, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("malformed embedding file: {0}")]
    Format(String),

    #[error("zero-norm vector")]
    ZeroNorm,

    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("terms not in vocabulary: {}", .0.join(", "))]
    MissingTerms(Vec<String>),

    #[error("empty vocabulary intersection")]
    EmptyIntersection,

    #[error("cannot draw {requested} distinct pairs from {available}")]
    TooManyPairs { requested: u64, available: u64 },

    #[error("degenerate difference set")]
    DegenerateDifferences,

    #[error("no pairs in vocabulary")]
    NoPairsInVocabulary,

    #[error("no neutral terms in vocabulary")]
    NoNeutralTerms,

    #[error("invalid term set: {0}")]
    InvalidTermSet(String),

    #[error("kendall tau undefined: {0}")]
    TauUndefined(String),

    #[error("statistics input error: {0}")]
    Stats(String),

    #[error("too many degenerate bootstrap replicates: {skipped} of {total}")]
    TooManySkipped { skipped: usize, total: usize },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
