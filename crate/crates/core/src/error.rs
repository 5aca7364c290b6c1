use thiserror::Error;

/// Errors raised by the coders, codecs and file formats in this crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("index {index} out of range for precision {precision}")]
    IndexOutOfRange { index: u64, precision: u64 },

    #[error("precision must be at least 1")]
    ZeroPrecision,

    #[error("precision {precision} exceeds backend limit {max}")]
    PrecisionTooLarge { precision: u64, max: u64 },

    #[error("element width mismatch: expected {expected} bytes, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("element width must be at least 1")]
    ZeroWidth,

    #[error("duplicate element {0}")]
    DuplicateElement(String),

    #[error("empty cluster")]
    EmptyCluster,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("stream ended after {decoded} of {expected} elements")]
    Truncated { decoded: u64, expected: u64 },

    #[error("corrupt container: {0}")]
    Corrupt(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid size profile: {0}")]
    InvalidProfile(String),

    #[error("element width {width} too small for {n} distinct elements")]
    WidthTooSmall { width: usize, n: u64 },

    #[error("roundtrip mismatch: {0}")]
    RoundtripMismatch(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
