use crate::models::Family;
use crate::types::Factor;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the evaluation, accounting and policy layers.
///
/// Everything here is `Clone` so scenario runs can keep failed points in-line
/// with the trajectory instead of aborting.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("total labor L + L_agi is zero; productivity is undefined")]
    ZeroTotalLabor,

    #[error("total factor income is zero; the power shift is undefined")]
    ZeroTotalIncome,

    #[error("{family}: input {factor} = {value} is outside the domain of the production function")]
    Domain {
        family: Family,
        factor: Factor,
        value: f64,
    },

    #[error("{family}: evaluation produced a non-finite value at the given inputs")]
    NonFinite { family: Family },

    #[error("{family}: parameter `{name}` {reason}")]
    Param {
        family: Family,
        name: &'static str,
        reason: String,
    },

    #[error("invalid factor inputs: {0}")]
    InvalidInputs(String),

    #[error("{0} is not differentiable; finite-difference checks do not apply")]
    NonSmoothFamily(Family),

    #[error("{name} = {value} is outside its admissible range {range}")]
    RateOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("fixed levy must be non-negative, got {0}")]
    NegativeLevy(f64),

    #[error("finite-difference step {0} must lie in (0, 1e-2]")]
    InvalidStep(f64),

    #[error("invalid ramp: {0}")]
    InvalidRamp(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}
