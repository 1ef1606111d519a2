use thiserror::Error;

/// Errors raised by the numerical operators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("point ({x1}, {x2}) lies outside the closed unit disk")]
    OutOfDomain { x1: f64, x2: f64 },
    #[error("ray from ({x1}, {x2}, theta={theta}) did not exit before arclength {tau_max}")]
    TrappedRay {
        x1: f64,
        x2: f64,
        theta: f64,
        tau_max: f64,
    },
    #[error("fiber degree {degree} exceeds the dealiasing limit {limit}")]
    DegreeTooHigh { degree: usize, limit: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("unsupported tensor rank {0}")]
    UnsupportedRank(usize),
    #[error("solver did not converge: {iterations} iterations, relative residual {residual:e}")]
    SolverDivergence { iterations: usize, residual: f64 },
    #[error("boundary flux {flux:e} violates the compatibility condition")]
    IncompatibleFlux { flux: f64 },
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
