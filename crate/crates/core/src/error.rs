use thiserror::Error;

/// Errors raised by the matrix layer, the function catalog and the quantities built on them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e}, allowed {allowed:.3e})")]
    NotHermitian { deviation: f64, allowed: f64 },

    #[error("trace is {re}{im:+}i, expected 1")]
    TraceNotOne { re: f64, im: f64 },

    #[error("density is not invertible: smallest eigenvalue {min_eigenvalue:.3e} < {floor:.1e}")]
    NotInvertible { min_eigenvalue: f64, floor: f64 },

    #[error("eigen-solver did not converge for {label}")]
    NoConvergence { label: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular metric: {0}")]
    SingularMetric(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("finite-difference estimates disagree: {first} vs {second}")]
    NoisyDerivative { first: f64, second: f64 },

    #[error("Kraus operators are not trace preserving (deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("channel output is singular: smallest eigenvalue {min_eigenvalue:.3e}")]
    SingularOutput { min_eigenvalue: f64 },

    #[error("imaginary leakage in {quantity}: {im:.3e} against real part {re:.3e}")]
    ImaginaryLeakage { quantity: String, re: f64, im: f64 },

    #[error("step schedule exhausted: {0}")]
    StepsExhausted(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that come from a violated type invariant or precondition
    /// (as opposed to a function evaluated outside its domain).
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::NotSquare { .. }
                | Error::DimensionMismatch { .. }
                | Error::NotHermitian { .. }
                | Error::TraceNotOne { .. }
                | Error::NotInvertible { .. }
                | Error::Precondition(_)
                | Error::NotTracePreserving { .. }
        )
    }
}
