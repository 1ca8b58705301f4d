use thiserror::Error;

/// Errors raised by the solver, the analysis layer and the exporters.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("initial slope w0' must be positive and finite, got {0}")]
    InvalidSlope(f64),

    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("1 - r^2 kappa^2 = {0:e} is too close to zero")]
    SingularDenominator(f64),

    #[error("series start radius {eps} too large: cubic correction {correction:e} exceeds 1% of the linear term")]
    EpsTooLarge { eps: f64, correction: f64 },

    #[error("chart switch requires a negative slope, got w = {0}")]
    BadSwitch(f64),

    #[error("step size {h:e} underflowed at x = {at}")]
    StepUnderflow { at: f64, h: f64 },

    #[error("right-hand side is not finite at x = {0}")]
    NonFinite(f64),

    #[error("trajectory has no {0} event")]
    MissingEvent(&'static str),

    #[error("query {value} is outside the trajectory range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("solution is not biconcave ({0})")]
    NotBiconcave(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
