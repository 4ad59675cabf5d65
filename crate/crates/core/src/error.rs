use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("invalid instance: {0}")]
    Validation(String),

    #[error("invalid move: {0}")]
    InvalidMove(String),

    #[error("solver not applicable: {0}")]
    WrongFamily(String),

    #[error("search cap exceeded: {0}")]
    CapExceeded(String),

    #[error("invalid formula: {0}")]
    Formula(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn syntax(line: usize, msg: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
