use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported operation: {0}")]
    UnsupportedOperation(String),

    /// The requested exact block does not fit in the truncation.
    #[error("insufficient truncation: need at least {needed}, got {got}")]
    InsufficientTruncation { needed: usize, got: usize },

    #[error("degenerate equivalence: {0}")]
    DegenerateEquivalence(String),

    /// A series could not reach the requested tolerance below the cutoff cap.
    #[error("convergence failure: tail bound {tail_bound:e} at cap; cutoff 2L = {required_doubled} required")]
    ConvergenceFailure {
        tail_bound: f64,
        required_doubled: u32,
    },

    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: message.into(),
        }
    }
}
