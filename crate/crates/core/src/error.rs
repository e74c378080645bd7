use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("evaluation outside the domain at x = {x}: {reason}")]
    Domain { x: f64, reason: &'static str },

    #[error("frame index {index} out of range for a frame of {len} elements")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("invalid sampling scheme: {0}")]
    InvalidScheme(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("need at least as many samples as frame elements (M = {m}, N = {n})")]
    Undersampled { m: usize, n: usize },

    #[error("rank deficient system: {0}")]
    RankDeficient(String),

    #[error("singular value decomposition did not converge for a {rows}x{cols} matrix")]
    SvdFailed { rows: usize, cols: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = FrameError> = std::result::Result<T, E>;

impl FrameError {
    /// Numerical breakdown rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, FrameError::SvdFailed { .. } | FrameError::RankDeficient(_))
    }
}
