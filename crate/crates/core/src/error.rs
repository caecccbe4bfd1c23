use std::fmt;
use std::io;
use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure while decoding a binary graph snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SnapshotError {
    BadMagic { found: [u8; 4] },
    Version { found: u32, expected: u32 },
    Truncated { offset: u64, wanted: usize },
    Corrupt { offset: u64, reason: String },
}

impl fmt::Display for SnapshotError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SnapshotError::BadMagic { found } => {
                write!(f, "bad snapshot magic at offset 0: found {:?}, expected \"IGR1\"", found)
            }
            SnapshotError::Version { found, expected } => write!(
                f,
                "unsupported snapshot version at offset 4: found {found}, expected {expected}"
            ),
            SnapshotError::Truncated { offset, wanted } => write!(
                f,
                "snapshot truncated at byte offset {offset} (needed {wanted} more bytes)"
            ),
            SnapshotError::Corrupt { offset, reason } => {
                write!(f, "corrupt snapshot at byte offset {offset}: {reason}")
            }
        }
    }
}

#[derive(Debug)]
pub enum Error {
    Io { path: Option<PathBuf>, source: io::Error },
    Csv(csv::Error),
    Snapshot(SnapshotError),
    /// A URL that could not be normalized while strict URL handling is on.
    InvalidUrl(String),
    /// A user asked about is not present in the structure queried.
    UnknownUser(String),
    /// A statistic or metric has no defined value for the given input.
    Undefined(String),
    /// A prerequisite artifact is missing on disk.
    MissingArtifact(PathBuf),
    /// A required upstream metric was not supplied.
    MissingMetric(&'static str),
    Config(String),
    Infeasible(String),
    Data(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io { path: Some(path.into()), source }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Io { path: Some(p), source } => write!(f, "{}: {source}", p.display()),
            Error::Io { path: None, source } => write!(f, "i/o error: {source}"),
            Error::Csv(e) => write!(f, "csv error: {e}"),
            Error::Snapshot(e) => e.fmt(f),
            Error::InvalidUrl(u) => write!(f, "malformed url {u:?}"),
            Error::UnknownUser(u) => write!(f, "user {u:?} not present"),
            Error::Undefined(why) => write!(f, "undefined: {why}"),
            Error::MissingArtifact(p) => write!(f, "missing prerequisite: {}", p.display()),
            Error::MissingMetric(m) => write!(f, "missing upstream metric: {m}"),
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::Infeasible(msg) => write!(f, "infeasible scenario: {msg}"),
            Error::Data(msg) => write!(f, "data error: {msg}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            Error::Csv(e) => Some(e),
            _ => None,
        }
    }
}

impl From<io::Error> for Error {
    fn from(source: io::Error) -> Self {
        Error::Io { path: None, source }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e)
    }
}

impl From<SnapshotError> for Error {
    fn from(e: SnapshotError) -> Self {
        Error::Snapshot(e)
    }
}
