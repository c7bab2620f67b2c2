use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("malformed y4m header: {0}")]
    MalformedHeader(String),

    #[error("truncated frame {frame}: expected {expected} payload bytes, got {got}")]
    TruncatedFrame {
        frame: usize,
        expected: usize,
        got: usize,
    },

    #[error("unsupported chroma subsampling tag `{0}`")]
    UnsupportedChroma(String),

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("kernel radius {radius} too large for {width}x{height} plane")]
    KernelTooLarge {
        radius: usize,
        width: usize,
        height: usize,
    },

    #[error("clip of {frames} frames is shorter than the required {required}")]
    ClipTooShort { frames: usize, required: usize },

    #[error("{0}")]
    Degenerate(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("schema violation in `{field}`: {reason}")]
    Schema { field: String, reason: String },

    #[error("unknown demo `{0}`")]
    UnknownDemo(String),

    #[error("demo `{0}` needs an input clip")]
    MissingInput(String),
}

impl Error {
    /// True for errors caused by the caller's request rather than by data or
    /// the environment.
    pub fn is_schema_violation(&self) -> bool {
        matches!(
            self,
            Error::Schema { .. } | Error::InvalidParameter { .. } | Error::UnknownDemo(_) | Error::MissingInput(_)
        )
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
