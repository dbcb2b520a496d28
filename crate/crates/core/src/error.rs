use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ground sets differ: {left} vs {right} elements")]
    GroundSetMismatch { left: usize, right: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    /// A size or regime guard refused the request.
    #[error("refused: {0}")]
    Guard(String),

    #[error("moment table is not multiplicative over blocks")]
    NonMultiplicative,

    #[error("eigensolver did not converge: {0}")]
    Convergence(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn guard(msg: impl Into<String>) -> Self {
        Error::Guard(msg.into())
    }

    /// True for refusals issued by a size or regime guard.
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::Guard(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
