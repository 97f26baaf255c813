//! Population parameters of step distributions.
//!
//! Every functional here respects first-order stochastic dominance, which is
//! what lets a realised probability box be bounded by evaluating the
//! functional on its two edges.
//!
//! Weighted sums follow extended-real rules: zero-weight atoms are dropped
//! before multiplying, any positive weight at `+inf` makes the sum `+inf`
//! (likewise for `-inf`), and positive weight at both ends is an error.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pbox::{ExtendedReal, WeightedStepCdf};

/// A monotone population parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Functional {
    Mean,
    /// The `p`-quantile (value at risk), `inf { x : F(x) >= p }`.
    Quantile(f64),
    /// Mean of the lowest `p` of the probability mass.
    TruncatedMean(f64),
    /// Mean of the highest `1 - p` of the probability mass.
    Cvar(f64),
}

impl Functional {
    pub fn median() -> Self {
        Functional::Quantile(0.5)
    }

    /// Checks that any level parameter lies in `(0, 1)`.
    pub fn validate(self) -> Result<Self> {
        match self {
            Functional::Mean => Ok(self),
            Functional::Quantile(p) | Functional::TruncatedMean(p) | Functional::Cvar(p) => {
                check_level(p).map(|_| self)
            }
        }
    }

    pub fn evaluate(&self, dist: &WeightedStepCdf) -> Result<ExtendedReal> {
        self.eval_sorted(dist.supports(), dist.weights())
    }

    /// Evaluates on atoms with non-decreasing (possibly repeated) supports.
    pub(crate) fn eval_sorted(&self, supports: &[ExtendedReal], weights: &[f64]) -> Result<ExtendedReal> {
        match *self {
            Functional::Mean => mean_sorted(supports, weights),
            Functional::Quantile(p) => {
                check_level(p)?;
                Ok(supports[split_at_level(weights, p).index])
            }
            Functional::TruncatedMean(p) => {
                check_level(p)?;
                truncated_mean_sorted(supports, weights, p)
            }
            Functional::Cvar(p) => {
                check_level(p)?;
                cvar_sorted(supports, weights, p)
            }
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Functional::Mean => f.write_str("mean"),
            Functional::Quantile(0.5) => f.write_str("median"),
            Functional::Quantile(p) => write!(f, "quantile:{p}"),
            Functional::TruncatedMean(p) => write!(f, "trunc-mean:{p}"),
            Functional::Cvar(p) => write!(f, "cvar:{p}"),
        }
    }
}

/// Parses `mean | median | quantile:p | trunc-mean:p | cvar:p`.
impl FromStr for Functional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let level = || -> Result<f64> {
            let a = arg.ok_or_else(|| Error::Parse(format!("{name} needs a level, e.g. {name}:0.9")))?;
            a.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad level {a:?} in {s:?}")))
        };
        let f = match (name, arg) {
            ("mean", None) => Functional::Mean,
            ("median", None) => Functional::median(),
            ("quantile", _) => Functional::Quantile(level()?),
            ("trunc-mean", _) => Functional::TruncatedMean(level()?),
            ("cvar", _) => Functional::Cvar(level()?),
            _ => return Err(Error::Parse(format!("unknown parameter {s:?}"))),
        };
        f.validate()
    }
}

impl From<Functional> for String {
    fn from(f: Functional) -> String {
        f.to_string()
    }
}

impl TryFrom<String> for Functional {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

fn check_level(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

/// `sum w_i * s_i` under extended-real rules, skipping zero weights.
pub fn weighted_sum<I>(atoms: I) -> Result<ExtendedReal>
where
    I: IntoIterator<Item = (ExtendedReal, f64)>,
{
    let (mut pos_inf, mut neg_inf) = (false, false);
    let mut acc = 0.0;
    for (s, w) in atoms {
        if w <= 0.0 {
            continue;
        }
        if s.is_pos_inf() {
            pos_inf = true;
        } else if s.is_neg_inf() {
            neg_inf = true;
        } else {
            acc += w * s.value();
        }
    }
    match (neg_inf, pos_inf) {
        (true, true) => Err(Error::IndeterminateSum),
        (false, true) => Ok(ExtendedReal::POS_INF),
        (true, false) => Ok(ExtendedReal::NEG_INF),
        (false, false) => Ok(ExtendedReal::from_f64_unchecked(acc)),
    }
}

fn divide(sum: ExtendedReal, by: f64) -> ExtendedReal {
    if sum.is_finite() {
        ExtendedReal::from_f64_unchecked(sum.value() / by)
    } else {
        sum
    }
}

/// Where the level `p` falls in the cumulative weights.
struct LevelSplit {
    /// First atom whose cumulative weight reaches `p * total`.
    index: usize,
    /// `p * total`.
    threshold: f64,
    /// Cumulative weight strictly before `index`.
    before: f64,
    /// Cumulative weight up to and including `index`.
    through: f64,
    total: f64,
}

fn split_at_level(weights: &[f64], p: f64) -> LevelSplit {
    let total: f64 = weights.iter().sum();
    let threshold = p * total;
    let mut before = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        let through = before + w;
        if w > 0.0 && through >= threshold {
            return LevelSplit {
                index: i,
                threshold,
                before,
                through,
                total,
            };
        }
        before = through;
    }
    // rounding left the final partial sum a hair short; use the last positive atom
    let index = weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1);
    let before_idx: f64 = weights[..index].iter().sum();
    LevelSplit {
        index,
        threshold: threshold.min(before_idx + weights[index]),
        before: before_idx,
        through: before_idx + weights[index],
        total,
    }
}

fn mean_sorted(supports: &[ExtendedReal], weights: &[f64]) -> Result<ExtendedReal> {
    let total: f64 = weights.iter().sum();
    let m = divide(weighted_sum(supports.iter().copied().zip(weights.iter().copied()))?, total);
    if !m.is_finite() {
        return Ok(m);
    }
    // keep rounding inside the convex hull of the positive-weight atoms
    let lo = supports.iter().zip(weights).find(|(_, &w)| w > 0.0).map(|(s, _)| *s);
    let hi = supports.iter().zip(weights).rev().find(|(_, &w)| w > 0.0).map(|(s, _)| *s);
    match (lo, hi) {
        (Some(lo), Some(hi)) => Ok(m.clamp(lo, hi)),
        _ => Ok(m),
    }
}

fn truncated_mean_sorted(supports: &[ExtendedReal], weights: &[f64], p: f64) -> Result<ExtendedReal> {
    let sp = split_at_level(weights, p);
    let boundary = sp.threshold - sp.before;
    let atoms = supports[..sp.index]
        .iter()
        .copied()
        .zip(weights[..sp.index].iter().copied())
        .chain(std::iter::once((supports[sp.index], boundary)));
    Ok(divide(weighted_sum(atoms)?, sp.threshold))
}

fn cvar_sorted(supports: &[ExtendedReal], weights: &[f64], p: f64) -> Result<ExtendedReal> {
    let sp = split_at_level(weights, p);
    let boundary = sp.through - sp.threshold;
    let atoms = std::iter::once((supports[sp.index], boundary)).chain(
        supports[sp.index + 1..]
            .iter()
            .copied()
            .zip(weights[sp.index + 1..].iter().copied()),
    );
    Ok(divide(weighted_sum(atoms)?, sp.total - sp.threshold))
}

/// The mean `sum w_i s_i`; infinite when positive weight sits at an infinity.
pub fn q_mean(dist: &WeightedStepCdf) -> Result<ExtendedReal> {
    Functional::Mean.evaluate(dist)
}

/// The generalized-inverse quantile at `p` in `(0, 1)`.
pub fn q_quantile(dist: &WeightedStepCdf, p: f64) -> Result<ExtendedReal> {
    Functional::Quantile(p).evaluate(dist)
}

/// Mean of the lowest-`p` part of `dist`.
///
/// The atom at the `p`-quantile is split so exactly mass `p` is averaged.
pub fn q_truncated_mean(dist: &WeightedStepCdf, p: f64) -> Result<ExtendedReal> {
    Functional::TruncatedMean(p).evaluate(dist)
}

/// Conditional value at risk: mean of the upper `1 - p` tail, with the same
/// atom splitting as [`q_truncated_mean`], so that
/// `mean = p * trunc_mean + (1 - p) * cvar`.
pub fn q_cvar(dist: &WeightedStepCdf, p: f64) -> Result<ExtendedReal> {
    Functional::Cvar(p).evaluate(dist)
}

/// Bounds of a monotone functional over one realised probability box.
///
/// `weights[i]` is the mass of the interval `[points[i], points[i+1]]`. The
/// lower CDF puts it on the right endpoint and yields `q_max`; the upper CDF
/// puts it on the left endpoint and yields `q_min`.
pub fn bounds_for_monotonic(
    weights: &[f64],
    reduced_points: &[ExtendedReal],
    f: Functional,
) -> Result<(ExtendedReal, ExtendedReal)> {
    if weights.len() + 1 != reduced_points.len() {
        return Err(Error::LengthMismatch {
            expected: reduced_points.len().saturating_sub(1),
            got: weights.len(),
        });
    }
    let n = weights.len();
    let q_min = f.eval_sorted(&reduced_points[..n], weights)?;
    let q_max = f.eval_sorted(&reduced_points[1..], weights)?;
    debug_assert!(q_min <= q_max);
    Ok((q_min, q_max))
}
