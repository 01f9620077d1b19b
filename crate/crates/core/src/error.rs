use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration value or combination of values.
    #[error("configuration error: {0}")]
    Config(String),

    /// A caller violated an operation's preconditions (length or dimension mismatch, index
    /// out of range).
    #[error("usage error: {0}")]
    Usage(String),

    #[error("target of {width}x{height} at ({x}, {y}) does not fit in a {fov_width}x{fov_height} field of view")]
    OutOfBounds {
        x: i64,
        y: i64,
        width: usize,
        height: usize,
        fov_width: usize,
        fov_height: usize,
    },

    /// The reconstruction carries no usable signal (no strictly positive pixel, or a constant
    /// image where a dynamic range is required).
    #[error("degenerate image{}: {reason}", segment.map(|s| format!(" in segment {s}")).unwrap_or_default())]
    Degenerate {
        segment: Option<usize>,
        reason: String,
    },

    #[error("numerical check failed: {0}")]
    Numerical(String),

    #[error("malformed image data: {0}")]
    Format(String),

    #[error("i/o error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn degenerate(reason: impl Into<String>) -> Self {
        Error::Degenerate {
            segment: None,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attach a 1-based segment index to a degenerate-image error.
    pub fn in_segment(self, segment: usize) -> Self {
        match self {
            Error::Degenerate { reason, .. } => Error::Degenerate {
                segment: Some(segment),
                reason,
            },
            other => other,
        }
    }

    /// Process exit code for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Degenerate { .. } => 2,
            Error::Io { .. } => 3,
            _ => 1,
        }
    }
}
