use thiserror::Error;

pub type Result<T, E = GooseError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GooseError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("goal {0} can no longer be reached safely")]
    GoalUnreachable(usize),

    #[error("search did not converge within {0} iterations")]
    Overflow(u64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl GooseError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        GooseError::InvalidInput(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        GooseError::Parse {
            line,
            msg: msg.into(),
        }
    }
}
