use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("point is singular (z = 0)")]
    SingularPoint,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is singular (|det| = {0:e})")]
    SingularMatrix(f64),
    #[error("iteration did not converge: {0}")]
    ConvergenceFailure(String),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("metric is not positive-definite{}", .0.as_ref().map(|s| format!(": {s}")).unwrap_or_default())]
    NotPositiveDefinite(Option<String>),
    #[error("curvature tensor violates Chern symmetry (imaginary residue {0:e})")]
    SymmetryViolation(f64),
    #[error("bracket [{lo}, {hi}] does not contain a sign change")]
    BracketInvalid { lo: f64, hi: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
