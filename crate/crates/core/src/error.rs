use thiserror::Error;

/// Error type shared by every layer of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation's contract.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A run configuration is inconsistent; the message names the offending field.
    #[error("configuration error: {0}")]
    Config(String),
    /// Input data is unusable (non-finite values, empty series).
    #[error("data error: {0}")]
    Data(String),
    /// CSV parse failure with the 1-based line number.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }
}
