use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("document `{0}` is already indexed")]
    DuplicateDocument(String),

    #[error("query `{0}` has no searchable terms")]
    EmptyQuery(String),

    #[error("unknown document `{0}`")]
    UnknownDocument(String),

    #[error("malformed index file: {section}: {reason}")]
    MalformedIndex {
        section: &'static str,
        reason: String,
    },

    #[error("unsupported index format version `{found}` (expected `{expected}`)")]
    IndexVersion {
        found: String,
        expected: &'static str,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("config field `{field}` out of bounds: {bound}")]
    ConfigBound { field: &'static str, bound: String },

    #[error("no index at {}; build one with the `index` command", .0.display())]
    MissingIndex(PathBuf),

    #[error("no ingested pages under {}; run the `ingest` command first", .0.display())]
    NotIngested(PathBuf),

    #[error("corpus: {0}")]
    Corpus(String),

    #[error("invalid sessions file: {0}")]
    Sessions(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
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
}
