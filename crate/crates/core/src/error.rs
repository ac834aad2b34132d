use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid direction: v must be finite and nonzero")]
    InvalidDirection,

    #[error("{op} does not support {variant} sets")]
    UnsupportedVariant {
        op: &'static str,
        variant: &'static str,
    },

    #[error("point is not in the set")]
    PointNotInSet,

    #[error("point is outside dom T (the minimal time is infinite)")]
    NotInDomain,

    #[error("not computable: {0}")]
    NotComputable(String),

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
