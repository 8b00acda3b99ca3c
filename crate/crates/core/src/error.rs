use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A family or generator parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An argument is outside its domain (points off the unit interval,
    /// zero step counts, malformed specs).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A numeric evaluation failed (NaN/infinite value, non-convergence).
    #[error("numeric failure at {location}: {message}")]
    Numeric { location: String, message: String },

    /// The operation does not apply to this object (e.g. eigendecomposition
    /// of an asymmetric operator).
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// The model uses a feature outside the supported algebra
    /// (e.g. singular parts other than identity/flip atoms).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Root bracketing failed: no sign change over the given interval.
    #[error("no sign change over bracket [{lo}, {hi}]: f(lo)={f_lo}, f(hi)={f_hi}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// Envelope functions are incompatible with a doubly stochastic density.
    #[error("infeasible envelope: {0}")]
    InfeasibleEnvelope(String),

    /// The copula has no usable absolutely continuous part.
    #[error("singular copula: {0}")]
    SingularCopula(String),
}

pub type Result<T> = std::result::Result<T, Error>;
