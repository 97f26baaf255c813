use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Synthetic data sources for coverage experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// `exp(N(mu, sigma))` restricted to `[lo, hi]` by rejection.
    TruncatedLognormal { mu: f64, sigma: f64, lo: f64, hi: f64 },
    /// Emits `atom` with probability `atom_prob`, otherwise draws from `base`.
    ExtremeMixture {
        base: Box<Generator>,
        atom: f64,
        atom_prob: f64,
    },
    Normal { mu: f64, sigma: f64 },
}

impl Generator {
    /// Lognormal(0, 1) truncated to `[0, 50]`.
    pub fn truncated_lognormal_preset() -> Self {
        Generator::TruncatedLognormal {
            mu: 0.0,
            sigma: 1.0,
            lo: 0.0,
            hi: 50.0,
        }
    }

    /// The truncated lognormal preset with a 1% chance of the value 50.
    pub fn extreme_events_preset() -> Self {
        Generator::ExtremeMixture {
            base: Box::new(Self::truncated_lognormal_preset()),
            atom: 50.0,
            atom_prob: 0.01,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Generator::TruncatedLognormal { mu, sigma, lo, hi } => {
                if !(mu.is_finite() && sigma.is_finite() && *sigma > 0.0) {
                    return Err(Error::InvalidParameter(format!("lognormal({mu}, {sigma})")));
                }
                if lo.is_nan() || hi.is_nan() || lo >= hi || *hi <= 0.0 {
                    return Err(Error::InvalidParameter(format!("truncation [{lo}, {hi}]")));
                }
                Ok(())
            }
            Generator::ExtremeMixture {
                base,
                atom,
                atom_prob,
            } => {
                if !atom.is_finite() {
                    return Err(Error::NonFinite);
                }
                if !(0.0..=1.0).contains(atom_prob) {
                    return Err(Error::InvalidProbability(*atom_prob));
                }
                base.validate()
            }
            Generator::Normal { mu, sigma } => {
                if mu.is_finite() && sigma.is_finite() && *sigma > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("normal({mu}, {sigma})")))
                }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Generator::TruncatedLognormal { mu, sigma, lo, hi } => loop {
                let z: f64 = rng.sample(StandardNormal);
                let x = (mu + sigma * z).exp();
                if *lo <= x && x <= *hi {
                    return x;
                }
            },
            Generator::ExtremeMixture {
                base,
                atom,
                atom_prob,
            } => {
                if rng.random::<f64>() < *atom_prob {
                    *atom
                } else {
                    base.sample(rng)
                }
            }
            Generator::Normal { mu, sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                mu + sigma * z
            }
        }
    }

    /// The exact mean of the generated law.
    pub fn true_mean(&self) -> f64 {
        match self {
            Generator::TruncatedLognormal { mu, sigma, lo, hi } => {
                let phi = Normal::new(0.0, 1.0).expect("standard normal");
                let z = |x: f64, shift: f64| {
                    if x <= 0.0 {
                        0.0
                    } else {
                        phi.cdf((x.ln() - mu - shift) / sigma)
                    }
                };
                let s2 = sigma * sigma;
                let mass = z(*hi, 0.0) - z(*lo, 0.0);
                (mu + s2 / 2.0).exp() * (z(*hi, s2) - z(*lo, s2)) / mass
            }
            Generator::ExtremeMixture {
                base,
                atom,
                atom_prob,
            } => atom_prob * atom + (1.0 - atom_prob) * base.true_mean(),
            Generator::Normal { mu, .. } => *mu,
        }
    }

    /// `(lo, hi)` such that every draw lies in `[lo, hi]`.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Generator::TruncatedLognormal { lo, hi, .. } => (lo.max(0.0), *hi),
            Generator::ExtremeMixture { base, atom, .. } => {
                let (lo, hi) = base.support();
                (lo.min(*atom), hi.max(*atom))
            }
            Generator::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

/// `n` independent draws from `gen`.
pub fn generate<R: Rng + ?Sized>(gen: &Generator, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    gen.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one draw".into()));
    }
    Ok((0..n).map(|_| gen.sample(rng)).collect())
}
