use std::fmt;

use thiserror::Error;

/// Coarse classification of failures, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed input bytes.
    Parse,
    /// Well-formed input that violates a contract (shape, range, config).
    Validation,
    /// Numerically degenerate data (zero scale, zero variance, coincident points).
    Degenerate,
    /// Filesystem failure.
    Io,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Parse => "parse",
            ErrorKind::Validation => "validation",
            ErrorKind::Degenerate => "degenerate",
            ErrorKind::Io => "io",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("frame {frame}: {msg}")]
    Frame { frame: usize, msg: String },

    #[error("{0}")]
    Validation(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("joint index {index} out of range 1..={count}")]
    JointIndex { index: usize, count: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } | Error::Frame { .. } => ErrorKind::Parse,
            Error::Validation(_) | Error::Shape(_) | Error::JointIndex { .. } => {
                ErrorKind::Validation
            }
            Error::Degenerate(_) => ErrorKind::Degenerate,
            Error::Io(_) => ErrorKind::Io,
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
