use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^H| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension {0}: subsystem dimension must be at least 2")]
    InvalidDimension(usize),

    #[error("weight matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    SingularWeight { min_eigenvalue: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("value {0} is outside its allowed domain: {1}")]
    Domain(f64, &'static str),

    #[error("outcome has zero probability, conditional state undefined")]
    UndefinedConditional,

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("weak-correlation approximation is not available: {0}")]
    ApproximationInvalid(String),

    #[error("state is not aligned with the principal axes: {0}")]
    AlignmentViolated(String),

    #[error("qubit marginal is pure (|r_B| = 1); the measurement weight is singular")]
    DegenerateQubit,

    #[error("unknown entropic form `{0}`")]
    UnknownEntropy(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unknown minimization method `{0}`")]
    UnknownMethod(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
