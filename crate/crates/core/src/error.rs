use thiserror::Error;

/// Errors surfaced by the simulator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quadrature did not converge: estimate {estimate:.6e} with error {error:.3e} after {subdivisions} subdivisions")]
    QuadratureNonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("overlap matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    DegenerateBasis { min_eigenvalue: f64 },

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    #[error("Schrieffer-Wolff resonance on bond {bond}: denominator {denominator:.3e} meV")]
    Resonance { bond: usize, denominator: f64 },

    #[error("capacitive coupling alpha0 = {alpha0:.3e} meV is too small for a ratio")]
    UndefinedRatio { alpha0: f64 },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
