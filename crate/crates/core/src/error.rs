use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation (non-dominant
    /// weight, empty support, out-of-range index, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),

    /// A quadrature rule that cannot integrate the requested integrand exactly.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A symbol or integrand produced NaN or infinity.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    /// Representation construction did not certify.
    #[error("construction failure: {0}")]
    Construction(String),

    #[error("resource limit: {0}")]
    Resource(String),

    /// A quantity that should be an integer is too far from one.
    #[error("precision error: {0}")]
    Precision(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("not unitary: residual {0:e}")]
    NotUnitary(f64),

    #[error("not self-adjoint: residual {0:e}")]
    NotSelfAdjoint(f64),

    #[error("config error: {0}")]
    Config(String),
}
