use thiserror::Error;

/// Rejected configuration (reported at construction time, before any path runs).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("mode count n must be >= 1, got {0}")]
    ZeroModes(usize),
    #[error("m_quad = {m_quad} too small for n = {n}: dealiased quadrature needs >= {min}")]
    InsufficientQuadrature { n: usize, m_quad: usize, min: usize },
    #[error("gamma must lie in [0, 1/4), got {0}")]
    GammaOutOfRange(f64),
    #[error("dt must divide the horizon into an integer number of steps (dt = {dt}, horizon = {horizon})")]
    NonIntegerSteps { dt: f64, horizon: f64 },
    #[error("{0}")]
    Invalid(String),
}

/// Runtime failure of a simulation or estimator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("trajectory blew up (non-finite state) at step {step}, t = {t}")]
    BlowUp { step: usize, t: f64 },
    #[error("noise grid does not match the configuration: {0}")]
    GridMismatch(String),
    #[error("lambda = {lambda} at or beyond the radius of convergence; critical lambda = {critical}")]
    LambdaBeyondCritical { lambda: f64, critical: f64 },
    #[error("{0}")]
    Estimator(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
}
