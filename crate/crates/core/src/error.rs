use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid shape {height}x{width} does not match {len} values")]
    ShapeMismatch { height: usize, width: usize, len: usize },
    #[error("grid must have at least one row and one column")]
    EmptyGrid,
    #[error("non-finite value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("value {value} at index {index} is outside [0, 1]")]
    OutOfUnitRange { index: usize, value: f64 },
    #[error("infinity sentinel {sentinel} must exceed the grid maximum {max}")]
    SentinelTooSmall { sentinel: f64, max: f64 },
    #[error("compact multifiltration is not monotone across slices ({violations} violating pixels)")]
    NotMonotone { violations: usize },
    #[error("mask has no active pixel; distance transform undefined")]
    EmptyMask,
    #[error("expected {expected} channels, found {found}")]
    ChannelCount { expected: usize, found: usize },
    #[error("{0} must be strictly increasing")]
    NotIncreasing(&'static str),
    #[error("coordinate ({row}, {col}) outside {height}x{width} grid")]
    CoordOutOfRange {
        row: usize,
        col: usize,
        height: usize,
        width: usize,
    },
    #[error("grid of {height}x{width} exceeds the oracle limit of {limit}x{limit}")]
    OracleTooLarge { height: usize, width: usize, limit: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
