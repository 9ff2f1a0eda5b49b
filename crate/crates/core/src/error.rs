use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series is empty")]
    EmptySeries,

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("series date ranges do not overlap")]
    NoOverlap,

    #[error("duplicate location `{0}`")]
    DuplicateLocation(String),

    #[error("keyword mismatch: `{0}` vs `{1}`")]
    KeywordMismatch(String, String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("reference series never reaches onset threshold {threshold}")]
    OnsetNotFound { threshold: f64 },

    #[error("series for `{geo}` has zero variance")]
    ZeroVariance { geo: String },

    #[error("invalid correlation matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("labels do not match: {0}")]
    LabelMismatch(String),

    #[error("unsupported format `{0}`")]
    UnsupportedFormat(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("fetch failed after {attempts} attempt(s): {message}")]
    FetchFailed { attempts: u32, message: String },

    #[error("cache error: {0}")]
    Cache(String),

    #[error("{}: {source}", path.display())]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::InFile {
            path: path.into(),
            source: Box::new(self),
        }
    }

    /// Strips any file context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::InFile { source, .. } => source.root(),
            other => other,
        }
    }
}
