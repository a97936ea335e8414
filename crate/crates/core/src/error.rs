use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A rule space, permutation count or similar quantity exceeds what can be indexed.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("index {index} out of range for a space of {size}")]
    OutOfRange { index: u64, size: u64 },

    #[error("invalid binary string: {0}")]
    InvalidString(String),

    /// Invalid experiment or command configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no length-{n} string was produced by the sampled rules")]
    EmptySample { n: usize },

    #[error("cannot build a distribution from an empty multiset")]
    EmptyCounts,

    #[error("strings of different lengths mixed: expected {expected}, found {found}")]
    MixedLengths { expected: usize, found: usize },

    #[error("vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("at least 2 paired values are required, found {0}")]
    TooFewElements(usize),

    #[error("correlation undefined: zero variance")]
    UndefinedCorrelation,

    /// Too few shared classes to compare two distributions.
    #[error("incomparable: {0}")]
    Incomparable(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
