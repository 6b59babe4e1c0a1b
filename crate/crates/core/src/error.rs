use thiserror::Error;

/// Errors raised by the lattice, fan and Mori-theory routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("vectors are linearly dependent (rank {rank}, expected {expected})")]
    Rank { rank: usize, expected: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("fan is not complete: face {face:?} lies in {count} maximal cone(s)")]
    Incomplete { face: Vec<usize>, count: usize },

    #[error("fan is not projective")]
    NotProjective,

    #[error("not a Fano contraction: {0}")]
    NotFanoContraction(String),

    #[error("unsupported construction: {0}")]
    Unsupported(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("integer overflow converting {0} to a machine integer")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
