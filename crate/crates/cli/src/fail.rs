//! Exit codes and the one-line diagnostic printed on failure.

use std::fmt;
use std::path::Path;

use motionfid_core::{Error, ErrorKind};

#[derive(Debug)]
pub struct CliError {
    pub kind: ErrorKind,
    pub msg: String,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn parse(msg: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Parse,
            msg: msg.into(),
        }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Validation,
            msg: msg.into(),
        }
    }

    pub fn io(msg: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Io,
            msg: msg.into(),
        }
    }

    /// 1 parse or I/O, 2 validation, 3 numeric degeneracy.
    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Parse | ErrorKind::Io => 1,
            ErrorKind::Validation => 2,
            ErrorKind::Degenerate => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // keep it on one line
        let msg = self.msg.replace(['\n', '\r'], " ");
        write!(f, "error: {}: {}", self.kind, msg)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = match &e {
            Error::Io(io) => io.to_string(),
            other => other.to_string(),
        };
        Self {
            kind: e.kind(),
            msg,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::io(e.to_string())
    }
}

/// Attaches the file a failure came from.
pub trait WithPath<T> {
    fn at(self, path: &Path) -> CliResult<T>;
}

impl<T, E: Into<CliError>> WithPath<T> for Result<T, E> {
    fn at(self, path: &Path) -> CliResult<T> {
        self.map_err(|e| {
            let mut e = e.into();
            e.msg = format!("{}: {}", path.display(), e.msg);
            e
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_and_format() {
        let e = CliError::validation("bad\nthing");
        assert_eq!(e.exit_code(), 2);
        assert_eq!(e.to_string(), "error: validation: bad thing");
        assert_eq!(CliError::parse("x").exit_code(), 1);
        assert_eq!(CliError::io("x").exit_code(), 1);
        let d: CliError = Error::Degenerate("flat".into()).into();
        assert_eq!(d.exit_code(), 3);
        let p: Result<(), Error> = Err(Error::Validation("v".into()));
        assert_eq!(p.at(Path::new("a.gmo")).unwrap_err().msg, "a.gmo: v");
    }
}
