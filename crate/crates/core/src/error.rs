use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Newton iteration failed after {iterations} iterations (relative residual {residual:.3e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("amplitude bound violated: a = {amplitude} is not below c/2 = {half_speed}")]
    AmplitudeBound { amplitude: f64, half_speed: f64 },

    #[error("argument unwrapping failed near theta = {theta}: jump of {jump:.3} rad after refinement")]
    Unwrap { theta: f64, jump: f64 },

    #[error("winding number {value:.4} is not within the guard band of an integer")]
    GuardBand { value: f64 },

    #[error("converged point rejected: {0}")]
    Rejected(String),

    #[error("fit window too small: {0}")]
    FitWindow(String),

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("malformed profile file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
