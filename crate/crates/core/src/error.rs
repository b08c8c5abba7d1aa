use thiserror::Error;

/// Errors raised by the algebra engine.
///
/// Mathematical outcomes (a failed identity, a non-trivial cohomology class)
/// are reported as data; this type is reserved for malformed input and
/// operations that are undefined for the given arguments.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("arity mismatch: expected {expected}, got {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("operation not supported for symmetry class {0}")]
    UnsupportedSymmetry(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("algebra fails the Filippov identity ({witnesses} violating index tuples)")]
    IdentityViolated { witnesses: usize },

    #[error("cochain is not a cocycle: {0}")]
    NotACocycle(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
