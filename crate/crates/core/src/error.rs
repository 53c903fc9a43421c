use thiserror::Error;

/// Errors raised by the optimization toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid preference: {0}")]
    InvalidPreference(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("variable {index} = {value} outside [{lower}, {upper}]")]
    OutOfBounds {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("variable {index} = {value} must be integral")]
    NonInteger { index: usize, value: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("run diverged at iteration {iteration}: {reason}")]
    Divergence { iteration: usize, reason: String },

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed data: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}
