use std::path::PathBuf;

/// Errors surfaced by every stage of the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("paper {paper_id}: {message}")]
    InvalidRecord { paper_id: String, message: String },

    #[error("unknown field label `{0}`")]
    UnknownField(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("unknown author `{0}`")]
    UnknownAuthor(String),

    #[error("author `{0}` has no papers in the corpus")]
    NoPapers(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty ego network for `{0}`")]
    EmptyEgoNetwork(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("missing circle data: {0}")]
    MissingCircles(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
