use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    MalformedRow { line: u64, message: String },

    #[error("line {line}: unparseable timestamp {value:?} (expected YYYY-MM-DD HH:MM)")]
    Timestamp { line: u64, value: String },

    #[error("missing required column {0:?}")]
    MissingColumn(&'static str),

    #[error("probabilities are undefined on an empty corpus")]
    EmptyCorpus,

    #[error("event {0:?} does not occur in the corpus; P(keyword | event) is undefined")]
    UndefinedConditional(String),

    #[error("corpus has no tokens; term-count share is undefined")]
    ZeroTotal,

    #[error("thematic weighting needs at least one context vector")]
    MissingContext,

    #[error("k = {k} is out of range for {n} vectors")]
    KOutOfRange { k: usize, n: usize },

    #[error("every vector is empty; nothing to cluster")]
    AllEmpty,

    #[error("inertia curve has {0} points; at least 3 are needed to locate an elbow")]
    CurveTooShort(usize),

    #[error("silhouette needs at least two non-empty clusters")]
    SingleCluster,

    #[error("assignment list has {assignments} entries for {vectors} vectors")]
    LengthMismatch { vectors: usize, assignments: usize },
}

impl Error {
    /// Whether the error stems from reading or parsing input, as opposed to a
    /// computation on a well-formed corpus.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. } | Error::MalformedRow { .. } | Error::Timestamp { .. } | Error::MissingColumn(_)
        )
    }
}
