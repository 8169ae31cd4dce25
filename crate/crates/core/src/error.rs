use thiserror::Error;

/// Errors raised by system construction and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point of kind {point} does not belong to a {system} system")]
    KindMismatch { system: String, point: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("subset is not forward-invariant: {0} escapes")]
    NotInvariant(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    /// True for the error classes a caller should treat as a resource limit.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
