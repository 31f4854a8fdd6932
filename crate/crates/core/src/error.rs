use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error)]
pub enum Error {
    /// Input parameters violate an operation's precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Invalid experiment configuration (file or flags).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A computation exceeded its resource budget (attempts, state count, enumeration size).
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// Malformed serialized input.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Machine-readable category used for CLI exit codes and FFI error codes.
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Precondition(_) => ErrorCategory::Precondition,
            Error::Config(_) | Error::Parse { .. } => ErrorCategory::Config,
            Error::Resource(_) | Error::Io(_) => ErrorCategory::Resource,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Precondition,
    Resource,
}

impl ErrorCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Config => "config",
            ErrorCategory::Precondition => "precondition",
            ErrorCategory::Resource => "resource",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Config => 2,
            ErrorCategory::Precondition => 3,
            ErrorCategory::Resource => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
