use thiserror::Error;

/// Errors produced by the analytic evaluators and samplers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("observation window is empty or degenerate")]
    EmptyWindow,

    #[error("point lies outside the observation window")]
    OutOfWindow,

    #[error("operation requires dimension {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("series did not certify tolerance {tol} within radius {radius}")]
    NonConvergence { radius: usize, tol: f64 },

    #[error("interference variance is zero (all edge densities vanish)")]
    ZeroVariance,

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("simulation window too small: truncation bias bound {bound:.3e} exceeds {limit:.3e} of the mean")]
    WindowInadequate { bound: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
