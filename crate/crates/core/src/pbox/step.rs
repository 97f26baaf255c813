use crate::error::{Error, Result};

use super::ExtendedReal;

/// Tolerance on the total mass of a step distribution.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A right-continuous step distribution function on the extended reals.
///
/// Supports are strictly increasing; equal supports are coalesced by summing
/// their weights when the distribution is built. Zero-weight atoms are kept.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedStepCdf {
    supports: Vec<ExtendedReal>,
    weights: Vec<f64>,
}

impl WeightedStepCdf {
    /// Builds a distribution from unordered atoms, sorting and coalescing
    /// equal supports.
    pub fn new(supports: Vec<ExtendedReal>, weights: Vec<f64>) -> Result<Self> {
        if supports.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: supports.len(),
                got: weights.len(),
            });
        }
        check_weights(&weights)?;
        let mut atoms: Vec<(ExtendedReal, f64)> = supports.into_iter().zip(weights).collect();
        atoms.sort_by_key(|a| a.0);
        let (s, w): (Vec<_>, Vec<_>) = atoms.into_iter().unzip();
        Ok(Self::from_sorted(&s, &w))
    }

    /// A single atom of unit mass.
    pub fn unit_step(at: ExtendedReal) -> Self {
        WeightedStepCdf {
            supports: vec![at],
            weights: vec![1.0],
        }
    }

    /// Builds from supports that are already non-decreasing, coalescing runs of
    /// equal supports. Weights are trusted.
    pub(crate) fn from_sorted(supports: &[ExtendedReal], weights: &[f64]) -> Self {
        debug_assert_eq!(supports.len(), weights.len());
        debug_assert!(supports.windows(2).all(|w| w[0] <= w[1]));
        let mut s = Vec::with_capacity(supports.len());
        let mut w: Vec<f64> = Vec::with_capacity(weights.len());
        for (&x, &p) in supports.iter().zip(weights) {
            match s.last() {
                Some(&last) if last == x => *w.last_mut().unwrap() += p,
                _ => {
                    s.push(x);
                    w.push(p);
                }
            }
        }
        WeightedStepCdf {
            supports: s,
            weights: w,
        }
    }

    pub fn supports(&self) -> &[ExtendedReal] {
        &self.supports
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }

    /// Iterates `(support, weight)` pairs in increasing support order.
    pub fn atoms(&self) -> impl Iterator<Item = (ExtendedReal, f64)> + '_ {
        self.supports.iter().copied().zip(self.weights.iter().copied())
    }

    pub(crate) fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `F(x)`: the total weight on supports `<= x`.
    pub fn cdf(&self, x: ExtendedReal) -> f64 {
        let k = self.supports.partition_point(|&s| s <= x);
        if k == self.supports.len() {
            return 1.0;
        }
        self.weights[..k].iter().fold(0.0, |a, w| a + w).min(1.0)
    }

    /// Left limit `F(x-)`: the total weight on supports `< x`.
    pub fn cdf_left(&self, x: ExtendedReal) -> f64 {
        let k = self.supports.partition_point(|&s| s < x);
        if k == self.supports.len() {
            return 1.0;
        }
        self.weights[..k].iter().fold(0.0, |a, w| a + w).min(1.0)
    }

    /// `inf { x : F(x) >= p }` for `p` in `(0, 1]`.
    pub fn generalized_inverse(&self, p: f64) -> Result<ExtendedReal> {
        check_quantile_level(p)?;
        Ok(self.supports[self.inverse_index(p)])
    }

    /// Index of the support returned by the generalized inverse at `p`.
    ///
    /// The comparison runs against `p` times the accumulated total so that
    /// `p = 1` always resolves to the last positive-weight atom, whatever the
    /// rounding in the partial sums.
    pub(crate) fn inverse_index(&self, p: f64) -> usize {
        let threshold = p * self.total_mass();
        let mut cum = 0.0;
        let last = self.weights.len() - 1;
        for (i, &w) in self.weights.iter().enumerate() {
            cum += w;
            if w > 0.0 && cum >= threshold {
                return i;
            }
        }
        // Only reachable when trailing rounding leaves cum a hair below threshold.
        self.weights.iter().rposition(|&w| w > 0.0).unwrap_or(last)
    }
}

pub(crate) fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidWeights("no atoms".into()));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::InvalidWeights(format!("weight {w} is negative or not finite")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::InvalidWeights(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

/// Accepts `p` in `(0, 1]`.
pub(crate) fn check_quantile_level(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}
