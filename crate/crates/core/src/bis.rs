//! Bayesian interval sampling.
//!
//! With `N` observations bracketed by the interval endpoints, the posterior
//! over distribution functions is a random probability box: the `N + 1` gaps
//! between consecutive extended order statistics receive weights drawn
//! uniformly from the simplex, the lower CDF puts each gap's weight on its
//! right end and the upper CDF on its left end. Within a gap nothing further
//! is claimed.
//!
//! For a monotone functional `q` each realisation yields a pair
//! `q_min = q[upper]`, `q_max = q[lower]`. The empirical laws of the two
//! samples form a probability box for `q`, and the credible interval at level
//! `c` spans the `(1 - c)/2` quantile of `q_min` through the `(1 + c)/2`
//! quantile of `q_max`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::dirichlet::{fill_dirichlet, merge_duplicates, sample_dirichlet, DirichletParams, WeightVector};
use crate::error::{Error, Result};
use crate::estimators::{bounds_for_monotonic, Functional};
use crate::pbox::{
    BoundingInterval, ExtendedOrderStats, ExtendedReal, IntervalEstimate, ProbabilityBox,
    WeightedStepCdf,
};
use crate::rng::RngStream;

/// Weight of the vacuous prior relative to one observation.
pub const PRIOR_WEIGHT: f64 = 1.0;

/// Resamples needed to leave about 100 draws in each tail at credibility `c`:
/// `ceil(100 / (1 - c))`.
pub fn default_n_resample(c: f64) -> Result<usize> {
    check_credibility(c)?;
    let x = 100.0 / (1.0 - c);
    // 1 - 0.9 is not exactly 0.1 in binary; snap values that are integers up to rounding
    let r = x.round();
    let n = if (x - r).abs() <= 1e-9 * r { r } else { x.ceil() };
    Ok(n as usize)
}

fn check_credibility(c: f64) -> Result<()> {
    if c > 0.0 && c < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(c))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BisConfig {
    pub functional: Functional,
    pub credibility: f64,
    pub n_resample: usize,
    pub seed: u64,
}

impl BisConfig {
    /// A config with the default resample count for `credibility` and seed 0.
    pub fn new(functional: Functional, credibility: f64) -> Result<Self> {
        Ok(BisConfig {
            functional: functional.validate()?,
            credibility,
            n_resample: default_n_resample(credibility)?,
            seed: 0,
        })
    }

    pub fn with_resamples(mut self, n: usize) -> Self {
        self.n_resample = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.functional.validate()?;
        check_credibility(self.credibility)?;
        if self.n_resample == 0 {
            return Err(Error::InvalidParameter("n_resample must be at least 1".into()));
        }
        Ok(())
    }

    /// True when fewer resamples are requested than the 100-per-tail rule suggests.
    pub fn tail_resolution_warning(&self) -> bool {
        default_n_resample(self.credibility).is_ok_and(|d| self.n_resample < d)
    }
}

/// Per-realisation bounds `q_min[i] <= q_max[i]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QSamples {
    pub q_min: Vec<ExtendedReal>,
    pub q_max: Vec<ExtendedReal>,
}

impl QSamples {
    pub fn len(&self) -> usize {
        self.q_min.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q_min.is_empty()
    }

    /// The probability box of the parameter: lower = ECDF of `q_max`,
    /// upper = ECDF of `q_min`.
    pub fn pbox(&self) -> Result<ProbabilityBox> {
        if self.is_empty() {
            return Err(Error::Empty);
        }
        Ok(ProbabilityBox::new_unchecked(ecdf(&self.q_max), ecdf(&self.q_min)))
    }
}

fn ecdf(samples: &[ExtendedReal]) -> WeightedStepCdf {
    let mut s = samples.to_vec();
    s.sort_unstable();
    let w = vec![1.0 / s.len() as f64; s.len()];
    WeightedStepCdf::from_sorted(&s, &w)
}

/// `inf { x : ECDF(x) >= p }` for sorted samples, computed on counts so that
/// levels such as `(1 - 0.9) / 2` land on the intended order statistic.
pub fn empirical_quantile(sorted: &[ExtendedReal], p: f64) -> Result<ExtendedReal> {
    if sorted.is_empty() {
        return Err(Error::Empty);
    }
    crate::pbox::check_quantile_level(p)?;
    let n = sorted.len();
    let nf = n as f64;
    let mut k = ((p * nf).ceil() as usize).clamp(1, n);
    while k > 1 && (k - 1) as f64 / nf >= p {
        k -= 1;
    }
    while k < n && (k as f64 / nf) < p {
        k += 1;
    }
    Ok(sorted[k - 1])
}

/// The credible interval spanning both edges of the parameter's probability box.
pub fn interval_estimate(qs: &QSamples, c: f64) -> Result<IntervalEstimate> {
    check_credibility(c)?;
    if qs.is_empty() || qs.q_max.is_empty() {
        return Err(Error::Empty);
    }
    let mut q_min = qs.q_min.clone();
    let mut q_max = qs.q_max.clone();
    q_min.sort_unstable();
    q_max.sort_unstable();
    let lo = empirical_quantile(&q_min, (1.0 - c) / 2.0)?;
    let hi = empirical_quantile(&q_max, (1.0 + c) / 2.0)?;
    IntervalEstimate::new(lo, hi, c)
}

/// One draw of the random probability box: a weight per gap, shared by both
/// edges.
#[derive(Clone, Debug, PartialEq)]
pub struct ImpreciseRealization {
    points: Vec<ExtendedReal>,
    weights: WeightVector,
}

impl ImpreciseRealization {
    pub fn points(&self) -> &[ExtendedReal] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weights on the right ends of the gaps.
    pub fn lower(&self) -> WeightedStepCdf {
        WeightedStepCdf::from_sorted(&self.points[1..], &self.weights)
    }

    /// Weights on the left ends of the gaps.
    pub fn upper(&self) -> WeightedStepCdf {
        WeightedStepCdf::from_sorted(&self.points[..self.points.len() - 1], &self.weights)
    }

    pub fn pbox(&self) -> ProbabilityBox {
        ProbabilityBox::new_unchecked(self.lower(), self.upper())
    }

    /// `(q_min, q_max)` for a monotone functional.
    pub fn bounds(&self, f: Functional) -> Result<(ExtendedReal, ExtendedReal)> {
        bounds_for_monotonic(&self.weights, &self.points, f)
    }
}

/// Draws a single realisation on the (possibly duplicate-merged) gap structure.
pub fn sample_realization<R: Rng + ?Sized>(
    reduced_points: &[ExtendedReal],
    params: &DirichletParams,
    rng: &mut R,
) -> Result<ImpreciseRealization> {
    if params.len() + 1 != reduced_points.len() {
        return Err(Error::LengthMismatch {
            expected: reduced_points.len().saturating_sub(1),
            got: params.len(),
        });
    }
    Ok(ImpreciseRealization {
        points: reduced_points.to_vec(),
        weights: sample_dirichlet(params, rng),
    })
}

/// Data prepared for repeated sampling: duplicate runs merged, Dirichlet
/// parameters per gap.
#[derive(Clone, Debug)]
pub struct BisSampler {
    stats: ExtendedOrderStats,
    points: Vec<ExtendedReal>,
    params: DirichletParams,
}

impl BisSampler {
    pub fn new(data: &[f64], interval: BoundingInterval) -> Result<Self> {
        Ok(Self::from_stats(ExtendedOrderStats::new(data, interval)?))
    }

    pub fn from_stats(stats: ExtendedOrderStats) -> Self {
        let (points, params) = merge_duplicates(&stats);
        BisSampler {
            stats,
            points,
            params,
        }
    }

    /// Uses the full `N + 1` gap structure without merging duplicates.
    pub fn unmerged(stats: ExtendedOrderStats) -> Self {
        let points = stats.points().to_vec();
        let params = DirichletParams::uniform(points.len() - 1).expect("at least one gap");
        BisSampler {
            stats,
            points,
            params,
        }
    }

    pub fn stats(&self) -> &ExtendedOrderStats {
        &self.stats
    }

    pub fn points(&self) -> &[ExtendedReal] {
        &self.points
    }

    pub fn params(&self) -> &DirichletParams {
        &self.params
    }

    pub fn realization<R: Rng + ?Sized>(&self, rng: &mut R) -> ImpreciseRealization {
        ImpreciseRealization {
            points: self.points.clone(),
            weights: sample_dirichlet(&self.params, rng),
        }
    }

    fn bounds_with<R: Rng + ?Sized>(
        &self,
        f: Functional,
        buf: &mut [f64],
        rng: &mut R,
    ) -> Result<(ExtendedReal, ExtendedReal)> {
        // all-ones parameters reduce to normalised exponentials
        fill_dirichlet(&self.params, buf, rng);
        bounds_for_monotonic(buf, &self.points, f)
    }

    /// `n` realisations drawn sequentially from one stream.
    pub fn run_seq<R: Rng + ?Sized>(&self, f: Functional, n: usize, rng: &mut R) -> Result<QSamples> {
        f.validate()?;
        let mut buf = vec![0.0; self.params.len()];
        let mut qs = QSamples {
            q_min: Vec::with_capacity(n),
            q_max: Vec::with_capacity(n),
        };
        for _ in 0..n {
            let (lo, hi) = self.bounds_with(f, &mut buf, rng)?;
            qs.q_min.push(lo);
            qs.q_max.push(hi);
        }
        Ok(qs)
    }

    /// `n` realisations in parallel; realisation `i` uses substream `(seed, i)`,
    /// so the result does not depend on the thread count.
    pub fn run_par(&self, f: Functional, n: usize, seed: u64) -> Result<QSamples> {
        f.validate()?;
        let pairs: Vec<(ExtendedReal, ExtendedReal)> = (0..n as u64)
            .into_par_iter()
            .map_init(
                || vec![0.0; self.params.len()],
                |buf, i| {
                    let mut rng = RngStream::substream(seed, i);
                    self.bounds_with(f, buf, &mut rng)
                },
            )
            .collect::<Result<_>>()?;
        let (q_min, q_max) = pairs.into_iter().unzip();
        Ok(QSamples { q_min, q_max })
    }
}

/// Runs the sampler for `cfg.n_resample` realisations.
pub fn bis_run(data: &[f64], interval: BoundingInterval, cfg: &BisConfig) -> Result<QSamples> {
    cfg.validate()?;
    BisSampler::new(data, interval)?.run_par(cfg.functional, cfg.n_resample, cfg.seed)
}

/// `bis_run` followed by `interval_estimate` at `cfg.credibility`.
pub fn bis_interval(data: &[f64], interval: BoundingInterval, cfg: &BisConfig) -> Result<IntervalEstimate> {
    let qs = bis_run(data, interval, cfg)?;
    interval_estimate(&qs, cfg.credibility)
}

/// Parameters of a beta law; either (not both) may be zero, in which case the
/// law is a point mass at 0 (`a = 0`) or at 1 (`b = 0`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub a: f64,
    pub b: f64,
}

impl BetaParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0 && a + b > 0.0 {
            Ok(BetaParams { a, b })
        } else {
            Err(Error::InvalidParameter(format!("beta parameters ({a}, {b})")))
        }
    }

    pub fn mean(&self) -> f64 {
        self.a / (self.a + self.b)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        if self.a == 0.0 {
            return 1.0;
        }
        if self.b == 0.0 {
            return 0.0;
        }
        Beta::new(self.a, self.b).expect("validated").cdf(x)
    }
}

/// Laws of the lower and upper CDF values at an off-data point `x`:
/// `Beta(N-, N+ + 1)` and `Beta(N- + 1, N+)`, where `N-`/`N+` count the
/// observations below/above `x`.
pub fn point_condition_betas(
    data: &[f64],
    interval: BoundingInterval,
    x: f64,
) -> Result<(BetaParams, BetaParams)> {
    let (below, above) = count_around(data, interval, x)?;
    Ok((
        BetaParams::new(below, above + 1.0)?,
        BetaParams::new(below + 1.0, above)?,
    ))
}

fn count_around(data: &[f64], interval: BoundingInterval, x: f64) -> Result<(f64, f64)> {
    let xe = ExtendedReal::finite(x)?;
    if !(interval.lo() < xe && xe < interval.hi()) {
        return Err(Error::OutOfBounds {
            value: x,
            lo: interval.lo(),
            hi: interval.hi(),
        });
    }
    let stats = ExtendedOrderStats::new(data, interval)?;
    let obs = stats.observations();
    if obs.binary_search(&xe).is_ok() {
        return Err(Error::AtObservation(x));
    }
    let below = obs.partition_point(|&o| o < xe);
    Ok((below as f64, (obs.len() - below) as f64))
}

/// The purely probabilistic contraction of the posterior: atoms at
/// `(lo, x(1), ..., x(N), hi)` with Dirichlet parameters
/// `(1/2, 1, ..., 1, 1/2)`. Its value at an off-data point follows
/// `Beta(N- + 1/2, N+ + 1/2)`; with no data that is the Jeffreys prior.
pub fn probabilistic_projection_params(
    data: &[f64],
    interval: BoundingInterval,
) -> Result<(Vec<ExtendedReal>, DirichletParams)> {
    let stats = ExtendedOrderStats::new(data, interval)?;
    let points = stats.points().to_vec();
    let mut params = vec![1.0; points.len()];
    params[0] = PRIOR_WEIGHT / 2.0;
    *params.last_mut().unwrap() = PRIOR_WEIGHT / 2.0;
    Ok((points, DirichletParams::new(params)?))
}

/// The point law of the probabilistic contraction at off-data `x`.
pub fn projection_point_law(data: &[f64], interval: BoundingInterval, x: f64) -> Result<BetaParams> {
    let (below, above) = count_around(data, interval, x)?;
    BetaParams::new(below + PRIOR_WEIGHT / 2.0, above + PRIOR_WEIGHT / 2.0)
}

/// One precise random distribution from the probabilistic contraction.
pub fn sample_projection<R: Rng + ?Sized>(
    points: &[ExtendedReal],
    params: &DirichletParams,
    rng: &mut R,
) -> Result<WeightedStepCdf> {
    if points.len() != params.len() {
        return Err(Error::LengthMismatch {
            expected: points.len(),
            got: params.len(),
        });
    }
    let w = sample_dirichlet(params, rng);
    Ok(WeightedStepCdf::from_sorted(points, &w))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE15: [f64; 15] = [
        1.435, 0.276, 3.603, 0.211, 2.996, 7.289, 0.426, 0.124, 1.523, 4.603, 1.696, 0.620, 0.338,
        6.351, 1.026,
    ];

    fn er(x: f64) -> ExtendedReal {
        ExtendedReal::new(x).unwrap()
    }

    fn half_line() -> BoundingInterval {
        BoundingInterval::from_f64(0.0, f64::INFINITY).unwrap()
    }

    #[test]
    fn resample_rule_of_thumb() {
        assert_eq!(default_n_resample(0.9).unwrap(), 1000);
        assert_eq!(default_n_resample(0.99).unwrap(), 10_000);
        assert_eq!(default_n_resample(0.5).unwrap(), 200);
        assert_eq!(default_n_resample(0.95).unwrap(), 2000);
        assert!(default_n_resample(1.0).is_err());
        assert!(default_n_resample(0.0).is_err());
    }

    #[test]
    fn tail_warning_flag() {
        let cfg = BisConfig::new(Functional::Mean, 0.9).unwrap();
        assert!(!cfg.tail_resolution_warning());
        assert!(cfg.with_resamples(999).tail_resolution_warning());
    }

    #[test]
    fn interval_from_small_samples() {
        let qs = QSamples {
            q_min: [1.0, 2.0, 3.0, 4.0].iter().map(|&x| er(x)).collect(),
            q_max: [2.0, 3.0, 4.0, 5.0].iter().map(|&x| er(x)).collect(),
        };
        let e = interval_estimate(&qs, 0.5).unwrap();
        assert_eq!((e.lo, e.hi), (er(1.0), er(4.0)));
        assert!(matches!(interval_estimate(&QSamples::default(), 0.5), Err(Error::Empty)));
    }

    #[test]
    fn empirical_quantile_hits_the_intended_order_statistic() {
        let xs: Vec<ExtendedReal> = (1..=1000).map(|i| er(i as f64)).collect();
        assert_eq!(empirical_quantile(&xs, (1.0 - 0.9) / 2.0).unwrap(), er(50.0));
        assert_eq!(empirical_quantile(&xs, (1.0 + 0.9) / 2.0).unwrap(), er(950.0));
        assert_eq!(empirical_quantile(&xs, 1.0).unwrap(), er(1000.0));
        assert_eq!(empirical_quantile(&xs, 1e-9).unwrap(), er(1.0));
    }

    #[test]
    fn vacuous_realisation_without_data() {
        let iv = BoundingInterval::from_f64(0.0, 1.0).unwrap();
        let s = BisSampler::new(&[], iv).unwrap();
        let mut rng = RngStream::new(0);
        for _ in 0..5 {
            let r = s.realization(&mut rng);
            assert_eq!(r.lower(), WeightedStepCdf::unit_step(er(1.0)));
            assert_eq!(r.upper(), WeightedStepCdf::unit_step(er(0.0)));
        }
    }

    #[test]
    fn realisation_bounds_touch_at_observations() {
        let s = BisSampler::new(&SAMPLE15, half_line()).unwrap();
        let mut rng = RngStream::new(12);
        for _ in 0..50 {
            let r = s.realization(&mut rng);
            let (lower, upper) = (r.lower(), r.upper());
            for &x in s.stats().observations() {
                assert!((upper.cdf_left(x) - lower.cdf(x)).abs() < 1e-12);
            }
            ProbabilityBox::new(lower, upper).unwrap();
        }
    }

    #[test]
    fn sample_realization_checks_lengths() {
        let pts = vec![er(0.0), er(1.0), er(2.0)];
        let mut rng = RngStream::new(0);
        let p = DirichletParams::uniform(2).unwrap();
        let r = sample_realization(&pts, &p, &mut rng).unwrap();
        assert_eq!(r.weights().len(), 2);
        assert!(sample_realization(&pts, &DirichletParams::uniform(3).unwrap(), &mut rng).is_err());
    }

    #[test]
    fn mean_upper_samples_are_unbounded_on_half_line() {
        let cfg = BisConfig::new(Functional::Mean, 0.9).unwrap().with_seed(3);
        let qs = bis_run(&SAMPLE15, half_line(), &cfg).unwrap();
        assert_eq!(qs.len(), 1000);
        assert!(qs.q_max.iter().all(|q| q.is_pos_inf()));
        assert!(qs.q_min.iter().all(|q| q.is_finite()));
        let e = interval_estimate(&qs, 0.9).unwrap();
        assert!(e.hi.is_pos_inf());
    }

    #[test]
    fn median_samples_stay_on_the_support() {
        let cfg = BisConfig::new(Functional::median(), 0.9).unwrap().with_seed(5);
        let qs = bis_run(&SAMPLE15, half_line(), &cfg).unwrap();
        for (lo, hi) in qs.q_min.iter().zip(&qs.q_max) {
            assert!(lo <= hi);
            assert!(lo.value() >= 0.0 && lo.value() <= 7.289);
            assert!(hi.is_pos_inf() || hi.value() <= 7.289);
        }
    }

    #[test]
    fn single_resample() {
        let cfg = BisConfig::new(Functional::median(), 0.9).unwrap().with_resamples(1);
        assert_eq!(bis_run(&SAMPLE15, half_line(), &cfg).unwrap().len(), 1);
        assert!(bis_run(&SAMPLE15, half_line(), &cfg.with_resamples(0)).is_err());
    }

    #[test]
    fn point_betas() {
        let (lo, up) = point_condition_betas(&SAMPLE15, half_line(), 1.0).unwrap();
        assert_eq!((lo.a, lo.b), (6.0, 10.0));
        assert_eq!((up.a, up.b), (7.0, 9.0));

        let (lo, up) = point_condition_betas(&SAMPLE15, half_line(), 0.01).unwrap();
        assert_eq!((lo.a, lo.b), (0.0, 16.0));
        assert_eq!((up.a, up.b), (1.0, 15.0));
        assert_eq!(lo.cdf(0.0), 1.0);

        let iv = BoundingInterval::from_f64(0.0, 1.0).unwrap();
        let (lo, up) = point_condition_betas(&[], iv, 0.3).unwrap();
        assert_eq!((lo.a, lo.b, up.a, up.b), (0.0, 1.0, 1.0, 0.0));
        assert_eq!(up.cdf(0.999), 0.0);

        assert_eq!(
            point_condition_betas(&SAMPLE15, half_line(), 1.026),
            Err(Error::AtObservation(1.026))
        );
        assert!(matches!(
            point_condition_betas(&SAMPLE15, half_line(), -1.0),
            Err(Error::OutOfBounds { .. })
        ));
        assert!(point_condition_betas(&SAMPLE15, half_line(), 0.0).is_err());
    }

    #[test]
    fn projection_params() {
        let iv = BoundingInterval::from_f64(0.0, 1.0).unwrap();
        let (pts, p) = probabilistic_projection_params(&[], iv).unwrap();
        assert_eq!(pts, vec![er(0.0), er(1.0)]);
        assert_eq!(p.alphas(), &[0.5, 0.5]);

        let (pts, p) = probabilistic_projection_params(&SAMPLE15, half_line()).unwrap();
        assert_eq!(pts.len(), 17);
        assert_eq!(p.total(), 16.0);
        let law = projection_point_law(&SAMPLE15, half_line(), 1.0).unwrap();
        assert_eq!((law.a, law.b), (6.5, 9.5));
        assert!((law.mean() - 6.5 / 16.0).abs() < 1e-15);
    }
}
