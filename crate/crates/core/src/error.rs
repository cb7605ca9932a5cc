use thiserror::Error;

/// Errors raised by the dynamo-spectra toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate pencil: det(C) = {det_c}, the eigenproblem is not quadratic")]
    DegeneratePencil { det_c: f64 },

    #[error("degenerate constraint: {0}")]
    DegenerateConstraint(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("undefined logarithm: |B| = 0 at t = {t}")]
    UndefinedLog { t: f64 },

    #[error(
        "sweep has {points} points, exceeding the cap of {cap}; raise the cap to at least {points}"
    )]
    CapExceeded { points: u64, cap: u64 },

    #[error("{varying} axes vary; a slice specification naming two axes is required")]
    SliceRequired { varying: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite, got {value}")))
    }
}
