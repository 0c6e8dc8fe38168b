use std::fmt;
use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug)]
pub enum Error {
    /// Malformed input: agent id out of range, empty pair list, mismatched
    /// sizes, and the like.
    InvalidArgument(String),
    /// Input is well-formed but too large for the requested operation
    /// (expanded action space over the cap, Bell number past the cap, ...).
    UnsupportedSize(String),
    /// Numeric degeneracy that the construction forbids, e.g. a value
    /// vector without a strict unique maximum.
    DegenerateValues(String),
    /// I/O failure, annotated with the path involved.
    Io { path: PathBuf, source: std::io::Error },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::UnsupportedSize(msg) => write!(f, "unsupported size: {msg}"),
            Error::DegenerateValues(msg) => write!(f, "degenerate values: {msg}"),
            Error::Io { path, source } => write!(f, "i/o error on {}: {source}", path.display()),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
