use thiserror::Error;

/// Errors raised by the workbench.
///
/// Contract violations by the caller (bad parameters, mismatched dimensions)
/// are distinguished from [`Error::InvariantViolation`], which signals that a
/// guarantee the algorithms rely on did not hold and therefore points at a bug.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime below 2^61")]
    NotPrime(u64),

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("direction vector is zero")]
    ZeroDirection,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field too small: {0}")]
    FieldTooSmall(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("polynomial has degree 0 in variable x{0}")]
    ZeroDegreeInVariable(usize),

    #[error("input exceeds the desk-scale cap: {0}")]
    CapExceeded(String),

    #[error("bisection search failed: {0}")]
    SearchFailed(String),

    #[error("line lies in the zero set")]
    LineInZeroSet,

    #[error("point is not on the surface")]
    NotOnSurface,

    #[error("line is not contained in the surface")]
    LineNotInSurface,

    #[error("arrangement is not generic: {0}")]
    NotGeneric(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
