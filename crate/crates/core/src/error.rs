use thiserror::Error;

/// Errors raised by the region computations and the scheme simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidPmf(String),

    #[error("invalid distortion matrix: {0}")]
    InvalidDistortion(String),

    #[error("distortion columns {0} and {1} are identical; remove one of them")]
    RedundantColumns(usize, usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("reconstruction index {index} out of range for {count} columns")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("reconstruction alphabet is empty")]
    EmptyReconstruction,

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("alphabet too large: {0}")]
    SizeGuard(String),

    #[error("degenerate distortion matrix: {0}")]
    Degenerate(String),

    #[error("linear program solver failed: {0}")]
    SolverFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
