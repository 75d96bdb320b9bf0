use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the domain of the function evaluated on it.
    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: String,
    },

    /// The score is undefined at this input (e.g. a stationary point for ratio-based scores).
    #[error("score is singular: {0}")]
    Singularity(String),

    /// Too few grid points for the finite-difference stencil.
    #[error("grid of {points} points is too short for a stencil needing {needed}")]
    Stencil { points: usize, needed: usize },

    /// Two arrays or grids that must agree in shape did not.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// ODE step too coarse for the requested range.
    #[error("step {step} is too large for range {range} (need at most range/100)")]
    Resolution { step: f64, range: f64 },

    /// Quantile requested at 0 or 1.
    #[error("quantile level {0} must lie strictly inside (0, 1)")]
    Boundary(f64),

    /// A normalized operation was requested on an improper prior.
    #[error("{0} is improper: only an unnormalized log-density is available")]
    Improper(&'static str),

    /// Invalid sampler or experiment configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Sampler start point has zero posterior density.
    #[error("log posterior is not finite at the initial value {0}")]
    Initialization(f64),

    /// A precondition on the inputs was violated.
    #[error("contract violated: {0}")]
    Contract(String),

    /// Deviance could not be evaluated at a posterior draw.
    #[error("non-finite deviance at draw {draw}")]
    NonFiniteDeviance { draw: usize },

    /// Malformed input data.
    #[error("invalid data: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, Error>;
