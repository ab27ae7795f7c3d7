use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: JSON schema violations, bad rationals, unknown ids.
    #[error("parse error at {pointer}: {message}")]
    Parse { pointer: String, message: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A bounded search or enumeration ran past its configured budget.
    #[error("budget exhausted: {0}")]
    Budget(String),

    #[error("internal invariant failed: {0}")]
    Invariant(String),

    #[error("value out of floating-point range: {0}")]
    Range(String),

    #[error("backend mismatch: {0}")]
    BackendMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parse(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            pointer: pointer.into(),
            message: message.into(),
        }
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        Error::Precondition(message.into())
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Io(_) => 2,
            Error::Precondition(_) | Error::BackendMismatch(_) | Error::Range(_) => 3,
            Error::Budget(_) => 4,
            Error::Invariant(_) => 5,
        }
    }
}
