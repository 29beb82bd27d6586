use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Input violates an operation's precondition (shape, simplex, range).
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("outcome space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("too many generators for hull computation: {got} (max {max})")]
    TooManyGenerators { got: usize, max: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
