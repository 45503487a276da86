use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("operator is not positive: min eigenvalue {min_eigenvalue:.6e}")]
    NotPositive { min_eigenvalue: f64, witness: Vec<[f64; 2]> },

    #[error("duality tags differ")]
    TagMismatch,

    #[error("point {0:?} lies outside the open unit disk")]
    OutsideDisk([f64; 2]),

    #[error("function is not defined at {0:?}")]
    Undefined([f64; 2]),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("increasing-function contract violated at t={t}: min eigenvalue of increment {min_eigenvalue:.3e}")]
    NotIncreasing { t: f64, min_eigenvalue: f64 },

    #[error("integration did not converge: {0}")]
    NotConverged(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("kernel Gram matrix is indefinite: {n_negative} negative eigenvalue(s), min {min_eigenvalue:.3e}")]
    IndefiniteGram { n_negative: usize, min_eigenvalue: f64 },

    #[error("relation defect {defect:.3e} exceeds {limit:.1e}; samples are not consistent with a positive-real function")]
    RelationDefect { defect: f64, limit: f64 },

    #[error("bound hypothesis F_n(t) <= F0 fails for member {member} at t={t}")]
    BoundViolated { member: usize, t: f64, witness: Vec<[f64; 2]> },

    #[error("selection did not converge: {0}")]
    SelectionFailed(String),

    #[error("real part is not positive at r={r}, t={t} (min eigenvalue {min_eigenvalue:.3e})")]
    NotCaratheodory { r: f64, t: f64, min_eigenvalue: f64 },

    #[error("unsupported for this function variant: {0}")]
    Unsupported(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
