use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    /// A state component exceeded the divergence threshold (or became non-finite).
    #[error("orbit diverged at step {step}")]
    Divergence { step: usize },

    #[error("separation collapsed to zero at step {step}")]
    ZeroSeparation { step: usize },

    #[error("tangent vector overflowed at step {step}; use a shorter renormalization interval")]
    Overflow { step: usize },

    #[error("rank-deficient matrix: |r[{index}][{index}]| fell below 1e-300{}", step_suffix(*.step))]
    RankDeficiency { index: usize, step: Option<usize> },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn step_suffix(step: Option<usize>) -> String {
    match step {
        Some(s) => format!(" at step {s}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
