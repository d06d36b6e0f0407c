use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{}: line {line}: {message}", path.display())]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: duplicate document id {id:?}", path.display())]
    DuplicateId { path: PathBuf, id: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("corpus has {available} < {required} tokens")]
    InsufficientTokens { available: usize, required: usize },

    #[error("empty profile: {0}")]
    EmptyProfile(String),

    #[error("need at least 2 corpora, got {0}")]
    TooFewCorpora(usize),

    #[error("record {id}: missing enrichment field {field}")]
    MissingField { id: String, field: &'static str },

    #[error("invalid pattern {pattern:?}: {source}")]
    Pattern {
        pattern: String,
        #[source]
        source: regex::Error,
    },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
