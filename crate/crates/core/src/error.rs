use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("level {level} is below the minimum level {min}")]
    LevelTooLow { level: u32, min: u32 },

    #[error("level {level} exceeds the supported maximum {max}")]
    LevelTooHigh { level: u32, max: u32 },

    #[error("haar index must be >= 1, got {0}")]
    InvalidHaarIndex(usize),

    #[error("point {0} lies outside [0, 1]")]
    PointOutOfRange(f64),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("sample grid with {intervals} intervals does not resolve {required} cells with {min_per_cell} samples each")]
    GridTooCoarse {
        intervals: usize,
        required: usize,
        min_per_cell: usize,
    },

    #[error("non-finite kernel value at ({s}, {t})")]
    NonFiniteKernel { s: f64, t: f64 },

    #[error("cholesky factorization failed at pivot {pivot} (value {value})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("level may not decrease: previous {previous}, requested {requested}")]
    LevelShrink { previous: u32, requested: u32 },
}
