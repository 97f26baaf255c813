//! Bayesian interval sampling.
//!
//! Observations on a known bounding interval define a posterior over
//! probability boxes. Sampling realisations and evaluating a monotone
//! functional on their lower and upper CDFs gives samples of the functional's
//! bounds, from which robust credible intervals are read off.

pub mod baselines;
pub mod bis;
pub mod dirichlet;
pub mod error;
pub mod estimators;
pub mod ks;
pub mod pbox;
pub mod rng;

pub use bis::{
    bis_interval, bis_run, default_n_resample, empirical_quantile, interval_estimate, BisConfig,
    BisSampler, QSamples,
};
pub use error::{Error, Result};
pub use estimators::Functional;
pub use pbox::{
    BoundingInterval, ExtendedOrderStats, ExtendedReal, IntervalEstimate, ProbabilityBox,
    WeightedStepCdf,
};
pub use rng::RngStream;
