use thiserror::Error;

/// Failure modes shared by every module of the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numeric error at step {step}: {message}")]
    NumericAtStep { step: u64, message: String },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("covariance is indefinite: eigenvalue {eigenvalue:e} is below the tolerance")]
    IndefiniteCovariance { eigenvalue: f64 },

    #[error("degenerate MDP: goal state has stationary mass {mass:e} under the greedy policy")]
    DegenerateMdp { mass: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
