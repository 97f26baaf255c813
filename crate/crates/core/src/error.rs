use thiserror::Error;

use crate::pbox::ExtendedReal;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("observation {value} lies outside the bounding interval [{lo}, {hi}]")]
    OutOfBounds {
        value: f64,
        lo: ExtendedReal,
        hi: ExtendedReal,
    },

    #[error("value is NaN or not finite where a finite value is required")]
    NonFinite,

    #[error("probability {0} is outside the admissible range")]
    InvalidProbability(f64),

    #[error("interval bounds must satisfy a < b (got a = {a}, b = {b})")]
    BadInterval { a: ExtendedReal, b: ExtendedReal },

    #[error("positive weight at both -inf and +inf; the weighted sum is indeterminate")]
    IndeterminateSum,

    #[error("no samples")]
    Empty,

    #[error("evaluation point {0} coincides with an observation")]
    AtObservation(f64),

    #[error("need at least {needed} observations, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}
