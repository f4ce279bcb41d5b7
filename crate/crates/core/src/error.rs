use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse failure classes. Front ends map these onto exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Io,
    Validation,
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed input at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("missing field `{field}` at line {line}")]
    MissingField { line: usize, field: &'static str },

    #[error("duplicate sample id `{0}`")]
    DuplicateId(String),

    #[error("vector file format error: {0}")]
    Format(String),

    #[error("non-finite value in row {row}")]
    NonFinite { row: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{0}")]
    Invalid(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } => ErrorKind::Io,
            Error::Numeric(_) => ErrorKind::Numeric,
            Error::NonFinite { .. }
            | Error::Parse { .. }
            | Error::MissingField { .. }
            | Error::DuplicateId(_)
            | Error::Format(_)
            | Error::Dimension(_)
            | Error::Invalid(_) => ErrorKind::Validation,
        }
    }
}
