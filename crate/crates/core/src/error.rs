use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by every platform operation.
///
/// Each variant maps onto one failure class the service layer reports
/// with a stable machine-readable code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{message}")]
    Validation { code: &'static str, message: String },
    #[error("{kind} not found: {id}")]
    NotFound { kind: &'static str, id: String },
    #[error("conflict: {0}")]
    Conflict(String),
    #[error("unauthorized: {0}")]
    Unauthorized(String),
    #[error("load error: {0}")]
    Load(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn validation(code: &'static str, message: impl Into<String>) -> Self {
        Error::Validation {
            code,
            message: message.into(),
        }
    }

    pub fn not_found(kind: &'static str, id: impl Into<String>) -> Self {
        Error::NotFound {
            kind,
            id: id.into(),
        }
    }

    pub fn load(message: impl Into<String>) -> Self {
        Error::Load(message.into())
    }

    /// Stable code reported to API clients.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Validation { code, .. } => code,
            Error::NotFound { .. } => "not_found",
            Error::Conflict(_) => "conflict",
            Error::Unauthorized(_) => "unauthorized",
            Error::Load(_) => "load_error",
            Error::Usage(_) => "usage",
            Error::Io(_) => "io",
        }
    }
}
