//! Extended-real step distributions and probability boxes.
//!
//! A probability box is a pair of distribution functions `lower <= upper`
//! bounding every distribution considered compatible with what is known.
//! All types here are immutable once built.

mod real;
mod step;

pub use real::{BoundingInterval, ExtendedReal};
pub use step::{WeightedStepCdf, MASS_TOLERANCE};

pub(crate) use step::{check_quantile_level, check_weights};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted observations with the bounding interval's endpoints attached:
/// `x(0) = lo`, `x(1) <= ... <= x(N)`, `x(N+1) = hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedOrderStats {
    points: Vec<ExtendedReal>,
    interval: BoundingInterval,
}

impl ExtendedOrderStats {
    /// Sorts `data` and brackets it with the interval endpoints.
    ///
    /// Every datum must be finite and inside `interval`. Empty data is fine.
    pub fn new(data: &[f64], interval: BoundingInterval) -> Result<Self> {
        let mut obs = Vec::with_capacity(data.len() + 2);
        obs.push(interval.lo());
        for &x in data {
            let v = ExtendedReal::finite(x)?;
            if !interval.contains(v) {
                return Err(Error::OutOfBounds {
                    value: x,
                    lo: interval.lo(),
                    hi: interval.hi(),
                });
            }
            obs.push(v);
        }
        obs[1..].sort_unstable();
        obs.push(interval.hi());
        Ok(ExtendedOrderStats {
            points: obs,
            interval,
        })
    }

    /// All `N + 2` points, endpoints included.
    pub fn points(&self) -> &[ExtendedReal] {
        &self.points
    }

    /// The sorted observations without the endpoints.
    pub fn observations(&self) -> &[ExtendedReal] {
        &self.points[1..self.points.len() - 1]
    }

    pub fn n_obs(&self) -> usize {
        self.points.len() - 2
    }

    pub fn interval(&self) -> BoundingInterval {
        self.interval
    }
}

/// Same as [`ExtendedOrderStats::new`].
pub fn make_extended_order_stats(
    data: &[f64],
    interval: BoundingInterval,
) -> Result<ExtendedOrderStats> {
    ExtendedOrderStats::new(data, interval)
}

/// A lower/upper pair of distribution functions with `lower <= upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityBox {
    lower: WeightedStepCdf,
    upper: WeightedStepCdf,
}

impl ProbabilityBox {
    /// Checks `lower.cdf(x) <= upper.cdf(x)` at every breakpoint of either
    /// function, which covers the whole line for step functions.
    pub fn new(lower: WeightedStepCdf, upper: WeightedStepCdf) -> Result<Self> {
        let pbox = ProbabilityBox { lower, upper };
        for x in pbox.breakpoints() {
            let (lo, hi) = (pbox.lower.cdf(x), pbox.upper.cdf(x));
            if lo > hi + MASS_TOLERANCE {
                return Err(Error::InvalidWeights(format!(
                    "lower bound {lo} exceeds upper bound {hi} at x = {x}"
                )));
            }
        }
        Ok(pbox)
    }

    pub(crate) fn new_unchecked(lower: WeightedStepCdf, upper: WeightedStepCdf) -> Self {
        ProbabilityBox { lower, upper }
    }

    /// The box that only asserts "all mass lies in the interval".
    pub fn vacuous(interval: BoundingInterval) -> Self {
        ProbabilityBox {
            lower: WeightedStepCdf::unit_step(interval.hi()),
            upper: WeightedStepCdf::unit_step(interval.lo()),
        }
    }

    /// A degenerate box around a single precise distribution.
    pub fn precise(dist: WeightedStepCdf) -> Self {
        ProbabilityBox {
            lower: dist.clone(),
            upper: dist,
        }
    }

    pub fn lower(&self) -> &WeightedStepCdf {
        &self.lower
    }

    pub fn upper(&self) -> &WeightedStepCdf {
        &self.upper
    }

    /// Sorted union of the supports of both bounds.
    pub fn breakpoints(&self) -> Vec<ExtendedReal> {
        let mut xs: Vec<ExtendedReal> = self
            .lower
            .supports()
            .iter()
            .chain(self.upper.supports())
            .copied()
            .collect();
        xs.sort_unstable();
        xs.dedup();
        xs
    }

    /// Lower and upper probability of the event `a < X <= b`.
    pub fn interval_probability(&self, a: ExtendedReal, b: ExtendedReal) -> Result<(f64, f64)> {
        if a >= b {
            return Err(Error::BadInterval { a, b });
        }
        let upper_p = (self.upper.cdf(b) - self.lower.cdf(a)).clamp(0.0, 1.0);
        let lower_p = (self.lower.cdf(b) - self.upper.cdf(a)).clamp(0.0, upper_p);
        Ok((lower_p, upper_p))
    }
}

/// Same as [`ProbabilityBox::interval_probability`].
pub fn pbox_interval_probability(
    pbox: &ProbabilityBox,
    a: ExtendedReal,
    b: ExtendedReal,
) -> Result<(f64, f64)> {
    pbox.interval_probability(a, b)
}

/// The expected posterior box: mass `1/(N+1)` on each of `x(1)..x(N+1)` for
/// the lower bound and on each of `x(0)..x(N)` for the upper bound.
pub fn expected_pbox(stats: &ExtendedOrderStats) -> ProbabilityBox {
    let pts = stats.points();
    let k = pts.len() - 1;
    let w = vec![1.0 / k as f64; k];
    ProbabilityBox::new_unchecked(
        WeightedStepCdf::from_sorted(&pts[1..], &w),
        WeightedStepCdf::from_sorted(&pts[..k], &w),
    )
}

/// A credible interval `[lo, hi]` at credibility `c`. Either end may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalEstimate {
    pub lo: ExtendedReal,
    pub hi: ExtendedReal,
    pub credibility: f64,
}

impl IntervalEstimate {
    pub fn new(lo: ExtendedReal, hi: ExtendedReal, credibility: f64) -> Result<Self> {
        if !(credibility > 0.0 && credibility < 1.0) {
            return Err(Error::InvalidProbability(credibility));
        }
        if lo > hi {
            return Err(Error::BadInterval { a: lo, b: hi });
        }
        Ok(IntervalEstimate { lo, hi, credibility })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo.value() <= x && x <= self.hi.value()
    }

    /// True when an endpoint is infinite.
    pub fn is_unbounded(&self) -> bool {
        !self.lo.is_finite() || !self.hi.is_finite()
    }

    /// True when `other` lies inside `self`.
    pub fn encloses(&self, other: &IntervalEstimate) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}
