use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{bayesian_bootstrap_interval, bootstrap_interval, student_t_interval, Generator};
use crate::bis::{empirical_quantile, interval_estimate, BisSampler};
use crate::error::{Error, Result};
use crate::estimators::Functional;
use crate::pbox::{BoundingInterval, ExtendedReal, IntervalEstimate};
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Method {
    StudentT,
    Bootstrap,
    BayesianBootstrap,
    Bis,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::StudentT,
        Method::Bootstrap,
        Method::BayesianBootstrap,
        Method::Bis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::StudentT => "student-t",
            Method::Bootstrap => "bootstrap",
            Method::BayesianBootstrap => "bayesian-bootstrap",
            Method::Bis => "bis",
        }
    }

    /// Computes this method's interval for one dataset.
    pub fn interval<R: Rng + ?Sized>(
        self,
        data: &[f64],
        f: Functional,
        c: f64,
        n_resample: usize,
        bounds: BoundingInterval,
        rng: &mut R,
    ) -> Result<IntervalEstimate> {
        match self {
            Method::StudentT => {
                if f != Functional::Mean {
                    return Err(Error::InvalidParameter(
                        "the Student-t interval only estimates the mean".into(),
                    ));
                }
                student_t_interval(data, c)
            }
            Method::Bootstrap => bootstrap_interval(data, f, c, n_resample, rng),
            Method::BayesianBootstrap => bayesian_bootstrap_interval(data, f, c, n_resample, rng),
            Method::Bis => {
                let qs = BisSampler::new(data, bounds)?.run_seq(f, n_resample, rng)?;
                interval_estimate(&qs, c)
            }
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown method {s:?}")))
    }
}

impl From<Method> for String {
    fn from(m: Method) -> String {
        m.name().to_string()
    }
}

impl TryFrom<String> for Method {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Everything a coverage run needs. `true_q` is supplied by the caller.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageSetup {
    pub generator: Generator,
    pub true_q: f64,
    pub method: Method,
    pub functional: Functional,
    pub n_sample: usize,
    pub credibility: f64,
    pub n_trials: usize,
    pub n_resample: usize,
    pub interval: BoundingInterval,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub method: Method,
    pub credibility: f64,
    pub n_trials: usize,
    pub hits: usize,
    pub hit_rate: f64,
    /// Median over trials of the lower endpoint.
    pub median_lo: ExtendedReal,
    /// Median over trials of the upper endpoint.
    pub median_hi: ExtendedReal,
}

impl CoverageReport {
    /// Binomial standard error of the hit rate under the nominal credibility.
    pub fn nominal_se(&self) -> f64 {
        (self.credibility * (1.0 - self.credibility) / self.n_trials as f64).sqrt()
    }
}

/// Repeats "draw `n_sample` points, compute the interval, check whether it
/// holds `true_q`" for `n_trials` independent datasets.
///
/// Trial `t` draws its data and its resampling noise from substream
/// `(seed, t)`, data first, so every method run with the same seed sees the
/// same datasets. Medians use the lower-median (inf) convention.
pub fn coverage_experiment(setup: &CoverageSetup) -> Result<CoverageReport> {
    setup.generator.validate()?;
    setup.functional.validate()?;
    if setup.n_trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    if !setup.true_q.is_finite() {
        return Err(Error::NonFinite);
    }
    let intervals: Vec<IntervalEstimate> = (0..setup.n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = RngStream::substream(setup.seed, t);
            let data = super::generate(&setup.generator, setup.n_sample, &mut rng)?;
            setup.method.interval(
                &data,
                setup.functional,
                setup.credibility,
                setup.n_resample,
                setup.interval,
                &mut rng,
            )
        })
        .collect::<Result<_>>()?;

    let hits = intervals.iter().filter(|e| e.contains(setup.true_q)).count();
    let mut los: Vec<ExtendedReal> = intervals.iter().map(|e| e.lo).collect();
    let mut his: Vec<ExtendedReal> = intervals.iter().map(|e| e.hi).collect();
    los.sort_unstable();
    his.sort_unstable();
    Ok(CoverageReport {
        method: setup.method,
        credibility: setup.credibility,
        n_trials: setup.n_trials,
        hits,
        hit_rate: hits as f64 / setup.n_trials as f64,
        median_lo: empirical_quantile(&los, 0.5)?,
        median_hi: empirical_quantile(&his, 0.5)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(method: Method, trials: usize) -> CoverageSetup {
        let generator = Generator::truncated_lognormal_preset();
        CoverageSetup {
            true_q: generator.true_mean(),
            generator,
            method,
            functional: Functional::Mean,
            n_sample: 20,
            credibility: 0.9,
            n_trials: trials,
            n_resample: 200,
            interval: BoundingInterval::from_f64(0.0, 50.0).unwrap(),
            seed: 17,
        }
    }

    #[test]
    fn single_trial_hit_rate_is_binary() {
        for m in Method::ALL {
            let r = coverage_experiment(&setup(m, 1)).unwrap();
            assert!(r.hit_rate == 0.0 || r.hit_rate == 1.0);
            assert!(r.median_lo <= r.median_hi);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let a = coverage_experiment(&setup(Method::Bis, 30)).unwrap();
        let b = coverage_experiment(&setup(Method::Bis, 30)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn student_t_needs_the_mean() {
        let mut s = setup(Method::StudentT, 3);
        s.functional = Functional::median();
        assert!(coverage_experiment(&s).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("jackknife".parse::<Method>().is_err());
    }
}
