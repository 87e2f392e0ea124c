use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("ambient dimension {0} is outside the supported range 1..=32")]
    UnsupportedDimension(usize),

    #[error("point cloud is empty")]
    EmptyPointCloud,

    #[error("at least {needed} points are required, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("points {0} and {1} are identical")]
    DuplicatePoints(usize, usize),

    #[error("coordinate {coord} of point {point} is not finite")]
    NonFinite { point: usize, coord: usize },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("size guardrail exceeded: {what} would need {needed}, limit is {limit}")]
    Guardrail {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("malformed event stream at event {index}: {msg}")]
    MalformedStream { index: usize, msg: String },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn malformed(index: usize, msg: impl Into<String>) -> Self {
        Error::MalformedStream {
            index,
            msg: msg.into(),
        }
    }
}
