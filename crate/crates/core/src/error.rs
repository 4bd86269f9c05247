use thiserror::Error;

/// Errors surfaced by layout generation, simulation, decoding and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    /// The caller asked for something outside an operation's domain.
    #[error("usage error: {0}")]
    Usage(String),

    /// An operation kind that the consumer cannot execute (e.g. measurement in a tableau).
    #[error("unsupported operation: {0}")]
    UnsupportedOp(String),

    /// A check ran to completion and found a mismatch.
    #[error("verification failed: {0}")]
    Verification(String),

    #[error("no crossing in range: {0}")]
    NoCrossing(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
