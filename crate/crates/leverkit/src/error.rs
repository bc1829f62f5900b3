use thiserror::Error;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix shape {rows}x{cols} does not match data length {len}")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },

    #[error("matrix must have at least one row and one column (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("non-finite entry {value} at ({row}, {col})")]
    NonFinite { row: usize, col: usize, value: f64 },

    #[error("dimension mismatch in {context}: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        context: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{context}: input has numerical rank zero")]
    ZeroRank { context: &'static str },

    #[error("index {index} exceeds numerical rank {rank}")]
    IndexBeyondRank { index: usize, rank: usize },

    #[error("index set is empty or contains duplicates/zeros: {0}")]
    BadIndexSet(String),

    #[error("matrix must have full column rank (rank {rank} of {cols} columns)")]
    RankDeficient { rank: usize, cols: usize },

    #[error("singular leverage update: |1 + (alpha^2 - 1) l_i| = {denominator:e} below 1e-12 (rank drop)")]
    SingularUpdate { denominator: f64 },

    #[error("mass threshold {threshold} exceeds total score mass {total} (shortfall {shortfall:e})")]
    UnsatisfiableMass { threshold: f64, total: f64, shortfall: f64 },

    #[error("infeasible leverage decay: {0}")]
    InfeasibleDecay(String),

    #[error("iteration did not converge: {0}")]
    NotConverged(String),

    #[error("SVD failed to converge")]
    SvdFailed,

    #[error("parse error at {path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
