use crate::geometry::FrameId;

/// Errors raised by the geometric and perception primitives.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("frame mismatch: expected {expected:?}, found {found:?}")]
    FrameMismatch { expected: FrameId, found: FrameId },
    #[error("rotation is not a proper orthonormal matrix (deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("ROI [{u_min}, {u_max}) x [{v_min}, {v_max}) is outside the {width}x{height} image or empty")]
    RoiOutOfBounds {
        u_min: usize,
        u_max: usize,
        v_min: usize,
        v_max: usize,
        width: usize,
        height: usize,
    },
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
