//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A buffer or frame did not have the expected number of elements.
    #[error("{what}: expected {expected} elements, got {got}")]
    InputSize {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// Two inputs that must refer to the same frame disagree.
    #[error("frame index mismatch: {left} vs {right}")]
    FrameMismatch { left: u64, right: u64 },

    /// A tensor had the wrong shape at a named network layer.
    #[error("shape mismatch at layer {layer}: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        layer: String,
        expected: Vec<usize>,
        got: Vec<usize>,
    },

    /// Invalid configuration value or inconsistent run setup.
    #[error("config error: {0}")]
    Config(String),

    /// Malformed or unsupported file content.
    #[error("format error in {path}: {reason}")]
    Format { path: String, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Numeric failure: NaN/Inf where finite values are required, or a
    /// computation with no valid result (e.g. scoring an all-silent file).
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
