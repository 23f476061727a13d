use thiserror::Error;

/// Errors produced while assembling operators, solving eigenproblems or
/// loading model configurations.
#[derive(Debug, Error)]
pub enum FockError {
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("capacity exceeded: {what} = {requested} exceeds cap {cap}")]
    Capacity {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("operator is not Hermitian: max |M - M^dagger| = {defect:e} > {tol:e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("one-particle operator must be strictly positive, smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("vector must be normalized, got norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("iterative solver did not converge after {iterations} iterations (achieved residual {achieved:e}, target {target:e})")]
    NonConvergence {
        iterations: usize,
        achieved: f64,
        target: f64,
    },

    #[error("operator norm did not converge: bracket [{lower}, {upper}]")]
    NormBracket { lower: f64, upper: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("refinement levels are not nested: {0}")]
    NotNested(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, FockError>;
