use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed input text or document.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    /// Shape problems that make a value meaningless before any axiom is
    /// checked (matrix dimensions, duplicate labels).
    #[error("structural error: {0}")]
    Structure(String),

    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An operation was handed data violating its documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A result failed its own re-verification. Always a bug.
    #[error("postcondition failed: {0}")]
    Postcondition(String),

    #[error("input too large for exhaustive search: {0}")]
    TooLarge(String),
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
