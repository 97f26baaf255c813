//! Random points on the unit simplex, Dirichlet vectors, and realisations of
//! the unit Dirichlet process on `[0, 1]` (also called the identity
//! Dirichlet process).
//!
//! Samplers take any [`rand::Rng`]; pass an [`RngStream`](crate::rng::RngStream)
//! for reproducible output.

use std::ops::Deref;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::pbox::{ExtendedOrderStats, ExtendedReal, WeightedStepCdf};
use crate::rng::open_unit;

/// Concentration parameters of a Dirichlet distribution, all strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletParams(Vec<f64>);

impl DirichletParams {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidParameter("Dirichlet needs at least one parameter".into()));
        }
        if let Some(a) = alphas.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "Dirichlet parameter {a} is not strictly positive"
            )));
        }
        Ok(DirichletParams(alphas))
    }

    /// `Dir[1, ..., 1]` of dimension `n`.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn alphas(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// True when every parameter equals one (the uniform law on the simplex).
    pub fn is_uniform(&self) -> bool {
        self.0.iter().all(|&a| a == 1.0)
    }
}

/// A point on the unit simplex: nonnegative entries summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    /// Validates nonnegativity and unit sum (within `1e-12`).
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        crate::pbox::check_weights(&weights)?;
        Ok(WeightVector(weights))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for WeightVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// A draw from `Dir[1, ..., 1]` on the `(n-1)`-simplex.
pub fn sample_uniform_simplex<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<WeightVector> {
    if n == 0 {
        return Err(Error::InvalidParameter("simplex dimension must be at least 1".into()));
    }
    let mut w = vec![0.0; n];
    fill_uniform_simplex(&mut w, rng);
    Ok(WeightVector(w))
}

/// In-place variant of [`sample_uniform_simplex`]: normalised unit-rate
/// exponentials `-ln U`, `U` in `(0, 1]`.
pub fn fill_uniform_simplex<R: Rng + ?Sized>(out: &mut [f64], rng: &mut R) {
    let mut total = 0.0;
    for w in out.iter_mut() {
        *w = -open_unit(rng).ln();
        total += *w;
    }
    normalize(out, total);
}

/// A Dirichlet draw via normalised `Gamma(alpha_i, 1)` variates.
pub fn sample_dirichlet<R: Rng + ?Sized>(params: &DirichletParams, rng: &mut R) -> WeightVector {
    let mut w = vec![0.0; params.len()];
    fill_dirichlet(params, &mut w, rng);
    WeightVector(w)
}

/// In-place variant of [`sample_dirichlet`].
///
/// When any parameter is below one the gamma variates are carried in log
/// space: `Gamma(a)` for tiny `a` routinely underflows to zero.
pub fn fill_dirichlet<R: Rng + ?Sized>(params: &DirichletParams, out: &mut [f64], rng: &mut R) {
    debug_assert_eq!(params.len(), out.len());
    let alphas = params.alphas();
    if alphas.iter().all(|&a| a >= 1.0) {
        let mut total = 0.0;
        for (w, &a) in out.iter_mut().zip(alphas) {
            *w = sample_gamma(a, rng);
            total += *w;
        }
        normalize(out, total);
    } else {
        let mut max = f64::NEG_INFINITY;
        for (w, &a) in out.iter_mut().zip(alphas) {
            *w = sample_ln_gamma(a, rng);
            max = max.max(*w);
        }
        let mut total = 0.0;
        for w in out.iter_mut() {
            *w = (*w - max).exp();
            total += *w;
        }
        normalize(out, total);
    }
}

fn normalize(w: &mut [f64], total: f64) {
    for x in w.iter_mut() {
        *x /= total;
    }
}

/// A `Gamma(shape, 1)` variate.
///
/// Shape one is the exponential; other shapes `>= 1` use the Marsaglia–Tsang
/// squeeze/rejection method, and shapes below one go through
/// [`sample_ln_gamma`].
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape == 1.0 {
        -open_unit(rng).ln()
    } else if shape > 1.0 {
        marsaglia_tsang(shape, rng)
    } else {
        sample_ln_gamma(shape, rng).exp()
    }
}

/// The natural log of a `Gamma(shape, 1)` variate, finite for any `shape > 0`.
///
/// For `shape < 1` this uses `G(a) = G(a + 1) * U^(1/a)`.
pub fn sample_ln_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape >= 1.0 {
        sample_gamma(shape, rng).ln()
    } else {
        marsaglia_tsang(shape + 1.0, rng).ln() + open_unit(rng).ln() / shape
    }
}

fn marsaglia_tsang<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    debug_assert!(shape >= 1.0);
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u = open_unit(rng);
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Collapses each run of identical extended order statistics to two copies
/// of the value and aggregates the Dirichlet parameters of the degenerate
/// intervals inside the run.
///
/// A run of `m + 1` equal points becomes one zero-width interval with
/// parameter `m`; every other interval keeps parameter 1. The parameters
/// always sum to `N + 1`.
pub fn merge_duplicates(stats: &ExtendedOrderStats) -> (Vec<ExtendedReal>, DirichletParams) {
    let pts = stats.points();
    let mut reduced = Vec::with_capacity(pts.len());
    let mut params = Vec::with_capacity(pts.len() - 1);
    let mut i = 0;
    while i < pts.len() {
        let mut j = i + 1;
        while j < pts.len() && pts[j] == pts[i] {
            j += 1;
        }
        if !reduced.is_empty() {
            params.push(1.0);
        }
        reduced.push(pts[i]);
        let run = j - i;
        if run > 1 {
            params.push((run - 1) as f64);
            reduced.push(pts[i]);
        }
        i = j;
    }
    // every entry is >= 1 and there are at least two points, so this cannot fail
    let params = DirichletParams::new(params).expect("merged parameters are positive");
    (reduced, params)
}

fn check_concentration(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("concentration {alpha} must be positive and finite")))
    }
}

/// A realisation of the unit Dirichlet process discretised on `n_cells` equal
/// cells of `[0, 1]`: weights `Dir[alpha/n, ..., alpha/n]` placed at the
/// right endpoints `i/n`.
pub fn sample_unit_dp_grid<R: Rng + ?Sized>(
    alpha: f64,
    n_cells: usize,
    rng: &mut R,
) -> Result<WeightedStepCdf> {
    check_concentration(alpha)?;
    if n_cells == 0 {
        return Err(Error::InvalidParameter("need at least one cell".into()));
    }
    let params = DirichletParams::new(vec![alpha / n_cells as f64; n_cells])?;
    let w = sample_dirichlet(&params, rng);
    let supports: Vec<ExtendedReal> = (1..=n_cells)
        .map(|i| ExtendedReal::from_f64_unchecked(i as f64 / n_cells as f64))
        .collect();
    Ok(WeightedStepCdf::from_sorted(&supports, &w))
}

/// A truncated stick-breaking realisation of the unit Dirichlet process.
///
/// The first `n_terms` atoms sit at uniform locations with stick fractions
/// `B_i ~ Beta(1, alpha)`; whatever stick remains goes to one extra atom at a
/// fresh uniform location, so the output has exactly unit mass.
pub fn sample_unit_dp_stick<R: Rng + ?Sized>(
    alpha: f64,
    n_terms: usize,
    rng: &mut R,
) -> Result<WeightedStepCdf> {
    check_concentration(alpha)?;
    if n_terms == 0 {
        return Err(Error::InvalidParameter("need at least one stick-breaking term".into()));
    }
    let mut atoms = stick_atoms(alpha, n_terms, rng);
    atoms.sort_by_key(|a| a.0);
    let (s, w): (Vec<_>, Vec<_>) = atoms.into_iter().unzip();
    Ok(WeightedStepCdf::from_sorted(&s, &w))
}

/// Unsorted stick-breaking atoms; the residual atom is last.
fn stick_atoms<R: Rng + ?Sized>(alpha: f64, n_terms: usize, rng: &mut R) -> Vec<(ExtendedReal, f64)> {
    let mut supports = Vec::with_capacity(n_terms + 1);
    let mut weights = Vec::with_capacity(n_terms + 1);
    let mut remaining = 1.0;
    for _ in 0..n_terms {
        // Beta(1, alpha) by inversion: 1 - U^(1/alpha)
        let b = -(open_unit(rng).ln() / alpha).exp_m1();
        let w = remaining * b;
        remaining -= w;
        supports.push(ExtendedReal::from_f64_unchecked(rng.random::<f64>()));
        weights.push(w);
    }
    supports.push(ExtendedReal::from_f64_unchecked(rng.random::<f64>()));
    weights.push(remaining.max(0.0));
    supports.into_iter().zip(weights).collect()
}
