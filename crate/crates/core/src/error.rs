use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A `ModelParams` invariant was violated.
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    /// A numeric argument outside its admissible range (mean <= 0, gamma out of bracket, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Degree or time outside the support of the function being evaluated.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("support mismatch: {left} vs {right} bins")]
    SupportMismatch { left: usize, right: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("duplicate degree row {degree}")]
    DuplicateDegree { degree: u64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParams(_) | Error::Parameter(_) | Error::Config(_) => ErrorKind::Usage,
            Error::SupportMismatch { .. }
            | Error::EmptyInput
            | Error::Malformed { .. }
            | Error::DuplicateDegree { .. }
            | Error::Io { .. } => ErrorKind::Data,
            Error::Domain(_) | Error::Fit(_) => ErrorKind::Numerical,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
