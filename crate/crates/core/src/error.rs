use thiserror::Error;

/// Errors raised by the exact kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("letter {letter} out of range for rank {rank}")]
    LetterOutOfRange { letter: i64, rank: usize },
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("supplied inverse does not invert generator {generator}")]
    NotInverse { generator: usize },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("edge set contains a cycle")]
    ForestHasCycle,
    #[error("marking check failed at generator {generator}")]
    MarkingFailed { generator: usize },
    #[error("invalid marking: {0}")]
    InvalidMarking(String),
    #[error("invalid lengths: {0}")]
    InvalidLengths(String),
    #[error("point has zero-length edges; an open-simplex point is required")]
    ZeroLengthEdge,
    #[error("tolerance must be positive")]
    NonPositiveTolerance,
    #[error("{0} is not a valid prime for this construction")]
    InvalidPrime(u64),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
