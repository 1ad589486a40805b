use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown tag `{0}`")]
    UnknownTag(String),
    #[error("unknown ordinal rank {0}")]
    UnknownRank(u32),
    #[error("empty constraint is not allowed under the closed world assumption")]
    EmptyConstraint,
    #[error("distributions or sets are defined over different frames")]
    FrameMismatch,
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid ordinal scale: {0}")]
    InvalidScale(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("tag set `{0}` is closed; new tags cannot be registered")]
    ClosedWorldViolation(String),
    #[error("duplicate tag `{0}`")]
    DuplicateTag(String),
    #[error("invalid record: {0}")]
    InvalidRecord(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: token index {found} is not contiguous (expected {expected})")]
    NonContiguousIndex { line: usize, expected: usize, found: usize },
    #[error("unknown document `{0}`")]
    UnknownDocument(String),
    #[error("records do not share a single target and layer")]
    TargetMismatch,
    #[error("empty input")]
    EmptyInput,
    #[error("no training data")]
    NoData,
    #[error("document has no tokens")]
    EmptyDocument,
    #[error("alignment error: {0}")]
    Alignment(String),
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error("corpus directory is locked by another writer ({0})")]
    Locked(String),
    #[error("duplicate document `{0}`")]
    DuplicateDocument(String),
    #[error("{path}: {error}")]
    InFile { path: String, error: Box<Error> },
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub(crate) fn in_file(path: &std::path::Path, error: Error) -> Self {
        match error {
            already @ Error::InFile { .. } => already,
            error => Error::InFile {
                path: path.display().to_string(),
                error: Box::new(error),
            },
        }
    }

    /// Innermost error, skipping file context.
    pub fn root(&self) -> &Error {
        match self {
            Error::InFile { error, .. } => error.root(),
            other => other,
        }
    }

    /// File the error was raised in, if known.
    pub fn file(&self) -> Option<&str> {
        match self {
            Error::InFile { path, .. } => Some(path),
            _ => None,
        }
    }

    /// Machine-readable code used in `FILE:LINE:CODE:MESSAGE` diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownTag(_) => "UnknownTag",
            Error::UnknownRank(_) => "UnknownRank",
            Error::EmptyConstraint => "EmptyConstraint",
            Error::FrameMismatch => "FrameMismatch",
            Error::InvalidFrame(_) => "InvalidFrame",
            Error::InvalidDistribution(_) => "InvalidDistribution",
            Error::InvalidScale(_) => "InvalidScale",
            Error::InvalidPartition(_) => "InvalidPartition",
            Error::ClosedWorldViolation(_) => "ClosedWorldViolation",
            Error::DuplicateTag(_) => "DuplicateTag",
            Error::InvalidRecord(_) => "InvalidRecord",
            Error::Parse { .. } => "ParseError",
            Error::NonContiguousIndex { .. } => "NonContiguousIndex",
            Error::UnknownDocument(_) => "UnknownDocument",
            Error::TargetMismatch => "TargetMismatch",
            Error::EmptyInput => "EmptyInput",
            Error::NoData => "NoData",
            Error::EmptyDocument => "EmptyDocument",
            Error::Alignment(_) => "AlignmentError",
            Error::ModelMismatch(_) => "ModelMismatch",
            Error::Locked(_) => "Locked",
            Error::DuplicateDocument(_) => "DuplicateDocument",
            Error::InFile { error, .. } => error.code(),
            Error::Io { .. } => "IoError",
        }
    }

    /// Source line, for errors that carry one.
    pub fn line(&self) -> Option<usize> {
        match self {
            Error::Parse { line, .. } | Error::NonContiguousIndex { line, .. } => Some(*line),
            Error::InFile { error, .. } => error.line(),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
