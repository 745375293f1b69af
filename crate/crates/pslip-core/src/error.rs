use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the numerical engines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter failed validation before any computation started.
    #[error("invalid parameter `{field}`: {message}")]
    Validation { field: &'static str, message: String },

    /// An input lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation requested exactly on the branch cut [1, inf) with an
    /// unsigned imaginary part, so the side of the cut is ambiguous.
    #[error("modulus m = {re} lies on the cut [1,inf) with ambiguous side; pass a negative (or negative-zero) imaginary part to select the -i0 branch")]
    BranchCut { re: f64 },

    /// Evaluation too close to a pole of an elliptic function.
    #[error("evaluation within pole-exclusion threshold of a pole near t = {location}")]
    PoleProximity { location: Complex64 },

    /// A characteristic quantity diverges at this exact parameter point.
    #[error("divergence: {0}")]
    Divergence(String),

    /// The auxiliary momentum left the convergence strip of the Fourier series.
    #[error("p = {p} outside the convergence strip: requires {side} bound {bound}")]
    StripViolation { p: f64, bound: f64, side: &'static str },

    /// A truncated series failed to meet its residual target.
    #[error("series truncation residual {residual:.3e} above tolerance at n_max = {n_max}; increase n_max")]
    Truncation { residual: f64, n_max: usize },

    /// A root bracket did not contain a sign change.
    #[error("no sign change in bracket [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    /// An iterative routine ran out of iterations.
    #[error("iteration limit reached in {0}")]
    NoConvergence(&'static str),

    /// Requested frequency is outside the representable harmonic window.
    #[error("frequency |nu| = {nu} exceeds the harmonic window n_max * omega_min = {max}")]
    Window { nu: f64, max: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn validation(field: &'static str, msg: impl Into<String>) -> Self {
        Error::Validation { field, message: msg.into() }
    }

    /// Exit-code class used by the CLI: 1 for validation, 2 for numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation { .. } => 1,
            _ => 2,
        }
    }
}
