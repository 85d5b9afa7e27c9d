use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("under-resolved: {0}")]
    UnderResolved(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("unknown symbol generator `{0}`")]
    UnknownSymbol(String),

    #[error("symbol `{0}` is not periodic on the requested grid")]
    NonPeriodic(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
