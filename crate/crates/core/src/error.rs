use thiserror::Error;

/// Failures raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("rejected input: {0}")]
    RejectedInput(String),
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("level {level} out of range 0..={max}")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("cube level {level} too deep for the grid (max {max})")]
    Resolution { level: usize, max: usize },
    #[error("scale {scale} is below the grid spacing {spacing}")]
    BelowResolution { scale: f64, spacing: f64 },
    #[error("cube does not meet the fundamental domain")]
    Domain,
    #[error("frequency {0} aliases on this grid")]
    Aliasing(i64),
    #[error("support of the dilated bump leaves the domain")]
    SupportOverflow,
    #[error("construction level {level} exceeds the limit {max}")]
    LevelOverflow { level: usize, max: usize },
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("kernel calibration failed, best lambda {best_lambda}")]
    Calibration { best_lambda: f64 },
    #[error("capability: {0}")]
    Capability(String),
    #[error("format: {0}")]
    Format(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
