use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e}, tolerance {tolerance:.3e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("trace is not one (got {0:.15})")]
    TraceNotOne(f64),

    #[error("state is not faithful: smallest eigenvalue {min_eigenvalue:.3e} below floor {floor:.0e}")]
    NotFaithful { min_eigenvalue: f64, floor: f64 },

    #[error("argument {0} is outside the domain (0, inf)")]
    Domain(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("direction is not traceless (trace {0:.3e})")]
    NotTraceless(f64),

    #[error("channel is not trace preserving (deviation {0:.3e})")]
    NotTracePreserving(f64),

    #[error("bad channel dimensions: {0}")]
    BadDims(String),

    #[error("hypothesis violated: {0}")]
    ConditionViolated(String),

    #[error("cannot parse function spec {spec:?}: {reason}")]
    FunctionSpec { spec: String, reason: String },

    #[error("malformed matrix data: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
