use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("quadrature did not converge on [{a}, {b}]: estimated error {achieved:e}")]
    QuadratureNonConvergence { a: f64, b: f64, achieved: f64 },

    #[error("tail behaviour of Θ is ambiguous up to r = {horizon}; supply a completeness hint")]
    Ambiguous { horizon: f64 },

    #[error("step size underflow at r = {r:e} (h = {h:e})")]
    StepSizeUnderflow { r: f64, h: f64 },

    #[error("step budget of {max_steps} exhausted at r = {r:e}")]
    MaxStepsExceeded { max_steps: usize, r: f64 },

    #[error("u and v vanish together at r = {r} (u = {u:e}, v = {v:e}); tighten the tolerances")]
    SimultaneousZero { r: f64, u: f64, v: f64 },

    #[error("seed bracket not confirmed: expected {expected} at eta = {eta}, found {found}")]
    BracketConfirmationFailed { eta: f64, expected: &'static str, found: String },

    #[error("bracket invariant broken at eta = {eta}: {detail}")]
    BracketInvariantBroken { eta: f64, detail: String },

    #[error("no globally positive proxy found for xi = {xi} in [{low}, {high}]")]
    NoGlobalProxyFound { xi: f64, low: f64, high: f64 },

    #[error("monotonicity violated between xi = {xi_a} (eta = {eta_a}) and xi = {xi_b} (eta = {eta_b})")]
    MonotonicityViolation { xi_a: f64, eta_a: f64, xi_b: f64, eta_b: f64 },

    #[error("limit enclosure width {width:e} exceeds requested {requested:e}; extend the horizon")]
    EnclosureTooWide { width: f64, requested: f64 },

    #[error("{0}")]
    CompletenessMismatch(String),

    #[error("the volume function is not convex (first failure near r = {witness})")]
    VolumeNotConvex { witness: f64 },

    #[error("config error in {field}: {message}")]
    Config { field: String, message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { field: field.into(), message: message.into() }
    }
}
