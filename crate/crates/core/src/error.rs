use thiserror::Error;

/// Failure modes shared by every numeric routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),
    #[error("size limit exceeded: {0}")]
    Overflow(String),
    #[error("input error: {0}")]
    Input(String),
}

impl Error {
    /// Stable machine-readable tag used in CLI error payloads.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "Domain",
            Error::NoSolution(_) => "NoSolution",
            Error::ConvergenceFailure(_) => "ConvergenceFailure",
            Error::Overflow(_) => "Overflow",
            Error::Input(_) => "Input",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(domain(format!("{name} = {x} is outside [0, 1]")))
    }
}

pub(crate) fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} = {x} must be positive and finite")))
    }
}
