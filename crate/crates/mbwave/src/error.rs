//! Crate-wide error type.
//!
//! Numerical routines report failures with enough payload to diagnose them
//! (where the iteration stood, what tolerance was requested). Callers that
//! surface errors to a CLI map `Domain`/`Config` to usage errors and the
//! rest to numerical failures.

use thiserror::Error;

/// Errors produced by curve construction, solvers, and field evaluation.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Argument outside the documented domain of an operation.
    #[error("domain error: {what} = {value} outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// A parameter failed validation (wrong range, wrong family, ...).
    #[error("invalid parameter {what}: {msg}")]
    InvalidParameter { what: &'static str, msg: String },

    /// The boundary curve violates an admissibility requirement.
    #[error("inadmissible curve: {msg}")]
    InadmissibleCurve { msg: String },

    /// Root bracketing failed: the function never crosses the target on the
    /// searchable range (e.g. a bounded map queried beyond its supremum).
    #[error("no root: {what} saturates at {reached} below target {target}")]
    Saturated {
        what: &'static str,
        reached: f64,
        target: f64,
    },

    /// An iterative routine stopped before reaching its tolerance.
    #[error("{what} did not converge: reached {achieved:.3e}, wanted {wanted:.3e} after {steps} steps")]
    NoConvergence {
        what: &'static str,
        achieved: f64,
        wanted: f64,
        steps: usize,
    },

    /// A constructed solution failed its own a-posteriori certification.
    #[error("certification failed for {what}: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    Certification {
        what: String,
        residual: f64,
        tol: f64,
    },

    /// A method's validity hypothesis does not hold for the supplied
    /// curve or data.
    #[error("hypothesis violated: {msg}")]
    Hypothesis { msg: String },

    /// Malformed configuration or data file.
    #[error("config error at {path}:{line}: {msg}")]
    Config {
        path: String,
        line: usize,
        msg: String,
    },
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, lo: f64, hi: f64) -> Self {
        Error::Domain {
            what,
            value,
            lo,
            hi,
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
