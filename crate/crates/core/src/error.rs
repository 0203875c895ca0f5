use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPsd { eigenvalue: f64 },

    #[error("exponent must be non-negative, got {0}")]
    NegativeExponent(f64),

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("vector is not a unit vector (norm {0})")]
    NotUnit(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown bound id `{0}`")]
    UnknownBound(String),

    #[error("bound `{0}` needs a second operator")]
    MissingSecondOperand(String),

    #[error("invalid ensemble spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
