use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the domain of a cumulant generating function or
    /// other partial function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A model or parameter set that violates its own invariants.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// A variational problem whose optimum is not attained inside the
    /// search window (objective still improving at the boundary).
    #[error("optimization diverges at the {side} boundary {at} of the search window")]
    Divergence { side: &'static str, at: f64 },

    #[error("supremum is unbounded above on the search interval")]
    Unbounded,

    #[error("tilt target {target} is not attainable inside the joint CGF domain (boundary theta {boundary})")]
    InfeasibleTilt { target: f64, boundary: f64 },

    #[error("cumulant order {order} exceeds the supported maximum {max}")]
    OrderTooHigh { order: usize, max: usize },

    #[error("need more than {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("empirical rate undefined for p_hat = {0}")]
    UndefinedRate(f64),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { path: path.into(), message: message.into() }
    }

    pub(crate) fn io(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        Error::Io { path: path.display().to_string(), message: err.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
