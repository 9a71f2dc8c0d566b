use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum FemError {
    #[error("mesh parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("simplex {0} is degenerate (zero volume)")]
    DegenerateSimplex(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("quadrature rule (n = {dim}, d = {degree}) unavailable: {reason}")]
    Quadrature {
        dim: usize,
        degree: usize,
        reason: String,
    },

    #[error("closest-pair solver `{solver}` did not converge after {iterations} iterations (gap {gap:e})")]
    ClosestPairNotConverged {
        solver: &'static str,
        iterations: usize,
        gap: f64,
    },

    #[error("point {0:?} lies outside the mesh")]
    PointOutsideMesh(Vec<f64>),

    #[error("unsupported derivative order {0} (only values and first derivatives are available)")]
    UnsupportedDerivative(usize),

    #[error("matrix is singular or numerically rank deficient")]
    SingularMatrix,

    #[error("{solver} did not converge: residual {residual:e} after {iterations} iterations")]
    NotConverged {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("Newton iteration diverged: residual grew for {steps} consecutive steps (last {residual:e})")]
    Diverged { steps: usize, residual: f64 },

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, FemError>;
