use thiserror::Error;

/// Errors raised by the deformation, flow, energy and invariant routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The conformal flow reaches C = 0 at `tau_star` (for the sample at `beta`, if known).
    #[error(
        "conformal flow exhausted its domain{}: C reaches 0 at tau* = {tau_star}",
        beta.map(|b| format!(" at beta = {b}")).unwrap_or_default()
    )]
    DomainExhausted { beta: Option<f64>, tau_star: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
