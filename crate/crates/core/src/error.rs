use thiserror::Error;

/// Errors produced by the channel model, the optimizer and the experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("temperature {temperature} °C is at or above the clearing point {clearing} °C")]
    AboveClearingPoint { temperature: f64, clearing: f64 },

    #[error("phase budget {0:.6} rad is at or below pi; the range constraint cannot be represented")]
    UnsupportedRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("non-finite values encountered in {0}")]
    NonFinite(&'static str),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("scenario validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("failed to parse scenario: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
