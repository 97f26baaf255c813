//! Reference interval methods and a coverage-simulation harness.
//!
//! The Student-t interval, the percentile bootstrap and the Bayesian
//! bootstrap serve as points of comparison for Bayesian interval sampling.

mod coverage;
mod generate;

pub use coverage::{coverage_experiment, CoverageReport, CoverageSetup, Method};
pub use generate::{generate, Generator};

use rand::Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::bis::empirical_quantile;
use crate::dirichlet::fill_uniform_simplex;
use crate::error::{Error, Result};
use crate::estimators::Functional;
use crate::pbox::{ExtendedReal, IntervalEstimate};

fn check_credibility(c: f64) -> Result<()> {
    if c > 0.0 && c < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(c))
    }
}

/// `mean ± t((1+c)/2, N-1) * s / sqrt(N)`.
pub fn student_t_interval(data: &[f64], c: f64) -> Result<IntervalEstimate> {
    check_credibility(c)?;
    if data.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: data.len(),
        });
    }
    if data.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let var = data.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let half = if var > 0.0 {
        let t = StudentsT::new(0.0, 1.0, n - 1.0)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .inverse_cdf((1.0 + c) / 2.0);
        t * (var / n).sqrt()
    } else {
        0.0
    };
    IntervalEstimate::new(
        ExtendedReal::finite(mean - half)?,
        ExtendedReal::finite(mean + half)?,
        c,
    )
}

/// Sorted copy of `data` as extended reals.
fn sorted_support(data: &[f64]) -> Result<Vec<ExtendedReal>> {
    if data.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let mut xs = data
        .iter()
        .map(|&x| ExtendedReal::finite(x))
        .collect::<Result<Vec<_>>>()?;
    xs.sort_unstable();
    Ok(xs)
}

fn percentile_interval(mut stats: Vec<ExtendedReal>, c: f64) -> Result<IntervalEstimate> {
    stats.sort_unstable();
    let lo = empirical_quantile(&stats, (1.0 - c) / 2.0)?;
    let hi = empirical_quantile(&stats, (1.0 + c) / 2.0)?;
    IntervalEstimate::new(lo, hi, c)
}

/// Percentile bootstrap: resample `N` values with replacement, evaluate `f`
/// on each resample's empirical distribution, and report the `(1 ± c)/2`
/// empirical quantiles of the replicates.
pub fn bootstrap_interval<R: Rng + ?Sized>(
    data: &[f64],
    f: Functional,
    c: f64,
    n_resample: usize,
    rng: &mut R,
) -> Result<IntervalEstimate> {
    check_credibility(c)?;
    f.validate()?;
    if n_resample == 0 {
        return Err(Error::InvalidParameter("n_resample must be at least 1".into()));
    }
    let xs = sorted_support(data)?;
    let n = xs.len();
    let unit = 1.0 / n as f64;
    let mut w = vec![0.0; n];
    let mut reps = Vec::with_capacity(n_resample);
    for _ in 0..n_resample {
        w.fill(0.0);
        for _ in 0..n {
            w[rng.random_range(0..n)] += unit;
        }
        reps.push(f.eval_sorted(&xs, &w)?);
    }
    percentile_interval(reps, c)
}

/// Bayesian bootstrap: uniform Dirichlet weights on the observed values.
pub fn bayesian_bootstrap_interval<R: Rng + ?Sized>(
    data: &[f64],
    f: Functional,
    c: f64,
    n_resample: usize,
    rng: &mut R,
) -> Result<IntervalEstimate> {
    check_credibility(c)?;
    f.validate()?;
    if n_resample == 0 {
        return Err(Error::InvalidParameter("n_resample must be at least 1".into()));
    }
    let xs = sorted_support(data)?;
    let mut w = vec![0.0; xs.len()];
    let mut reps = Vec::with_capacity(n_resample);
    for _ in 0..n_resample {
        fill_uniform_simplex(&mut w, rng);
        reps.push(f.eval_sorted(&xs, &w)?);
    }
    percentile_interval(reps, c)
}
