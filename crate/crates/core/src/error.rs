use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("position {position} lies outside the domain [{lower}, {upper}]")]
    OutOfDomain { position: f64, lower: f64, upper: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error(
        "Newton iteration did not converge at tau = {tau} (residual {residual:.3e} after {iterations} iterations)"
    )]
    Convergence { tau: f64, residual: f64, iterations: usize },

    #[error("time step fell below dt_min = {dt_min:.3e} at tau = {tau}")]
    StepTooSmall { tau: f64, dt_min: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("division by a zero spectral sample at index {0}")]
    ZeroSpectrum(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown scenario `{name}` (valid: {valid})")]
    UnknownScenario { name: String, valid: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical solver (as opposed to usage errors).
    pub fn is_solver_failure(&self) -> bool {
        matches!(self, Error::Convergence { .. } | Error::StepTooSmall { .. })
    }
}
