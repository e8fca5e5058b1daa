//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("character {0:?} is not in the keyboard layout")]
    CharNotInLayout(char),

    #[error("inserted character has no adjacent character to attach to")]
    NoNeighbor,

    #[error("invalid keyboard layout: {0}")]
    InvalidLayout(String),

    #[error("no usable pairs in seed corpus")]
    NoUsablePairs,

    #[error("character distribution is empty")]
    EmptyDistribution,

    #[error(
        "target error rate {requested} is unreachable; maximum achievable rate is {max_achievable}"
    )]
    RateUnreachable { requested: f64, max_achievable: f64 },

    #[error("invalid error rate {0}: must lie in [0, 1)")]
    InvalidRate(f64),

    #[error("unsupported format version {found} (expected {expected})")]
    UnsupportedVersion { found: u64, expected: u64 },

    #[error("malformed model file: {0}")]
    MalformedModel(String),

    #[error("invalid generation config: {0}")]
    InvalidConfig(String),

    #[error("document {doc}: token count mismatch (original {original}, final {final})")]
    TokenCountMismatch {
        doc: usize,
        original: usize,
        r#final: usize,
    },

    #[error("malformed dataset record at line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },

    #[error("empty suggestion string")]
    EmptySuggestion,

    #[error("no edits to summarize")]
    NoEdits,

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("corpora differ in document count ({references} references, {candidates} candidates)")]
    CorpusLengthMismatch {
        references: usize,
        candidates: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
