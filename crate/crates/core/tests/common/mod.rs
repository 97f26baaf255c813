#![allow(dead_code)]

use num_rational::Ratio;

use bis_core::estimators::{q_cvar, q_mean, q_quantile, q_truncated_mean};
use bis_core::{ExtendedReal, Functional, WeightedStepCdf};

pub const SAMPLE15: [f64; 15] = [
    1.435, 0.276, 3.603, 0.211, 2.996, 7.289, 0.426, 0.124, 1.523, 4.603, 1.696, 0.620, 0.338,
    6.351, 1.026,
];

pub fn er(x: f64) -> ExtendedReal {
    ExtendedReal::new(x).unwrap()
}

/// Atoms at `supports` with masses `counts / 64`; the last atom takes the
/// remainder, so every partial sum is exact.
pub fn dyadic(supports: &[f64], counts: &[u32]) -> WeightedStepCdf {
    assert_eq!(supports.len(), counts.len() + 1);
    let used: u32 = counts.iter().sum();
    assert!(used < 64);
    let mut w: Vec<f64> = counts.iter().map(|&c| c as f64 / 64.0).collect();
    w.push((64 - used) as f64 / 64.0);
    WeightedStepCdf::new(supports.iter().map(|&x| er(x)).collect(), w).unwrap()
}

/// Masses proportional to `counts` (at least one positive).
pub fn proportional(supports: &[f64], counts: &[u32]) -> WeightedStepCdf {
    let total: u32 = counts.iter().sum();
    let w = counts.iter().map(|&c| c as f64 / total as f64).collect();
    WeightedStepCdf::new(supports.iter().map(|&x| er(x)).collect(), w).unwrap()
}

pub fn all_functionals(p: f64) -> [Functional; 4] {
    [
        Functional::Mean,
        Functional::Quantile(p),
        Functional::TruncatedMean(p),
        Functional::Cvar(p),
    ]
}

/// Shifting every atom right can only lower the CDF, so each functional must
/// not decrease. Mean-type values are compared with a rounding allowance since
/// the shifted atoms are summed in a different order.
pub fn check_dominance(supports: &[f64], counts: &[u32], shifts: &[f64], p: f64) -> Result<(), String> {
    let z = proportional(supports, counts);
    let moved: Vec<f64> = supports.iter().zip(shifts).map(|(x, s)| x + s).collect();
    let y = proportional(&moved, counts);
    for x in y.supports().iter().chain(z.supports()) {
        if y.cdf(*x) > z.cdf(*x) + 1e-12 {
            return Err(format!("shifted cdf is not below the original at {x}"));
        }
    }
    for f in all_functionals(p) {
        let (qy, qz) = (f.evaluate(&y).unwrap().value(), f.evaluate(&z).unwrap().value());
        let slack = match f {
            Functional::Quantile(_) => 0.0,
            _ => 1e-12 * (1.0 + qz.abs()),
        };
        if qy < qz - slack {
            return Err(format!("{f}: dominated {qy} < dominating {qz}"));
        }
    }
    Ok(())
}

pub fn check_decomposition(dist: &WeightedStepCdf, p: f64) -> Result<(), String> {
    let m = q_mean(dist).unwrap().value();
    let t = q_truncated_mean(dist, p).unwrap().value();
    let c = q_cvar(dist, p).unwrap().value();
    let gap = (p * t + (1.0 - p) * c - m).abs();
    if gap <= 1e-10 {
        Ok(())
    } else {
        Err(format!("p {p}: p*tm + (1-p)*cvar differs from the mean by {gap}"))
    }
}

pub fn check_quantile_monotone(dist: &WeightedStepCdf, p1: f64, p2: f64) -> Result<(), String> {
    let (a, b) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
    if q_quantile(dist, a).unwrap() <= q_quantile(dist, b).unwrap() {
        Ok(())
    } else {
        Err(format!("quantile at {a} exceeds quantile at {b}"))
    }
}

pub fn check_mean_in_hull(dist: &WeightedStepCdf) -> Result<(), String> {
    let m = q_mean(dist).unwrap();
    let s = dist.supports();
    if s[0] <= m && m <= s[s.len() - 1] {
        Ok(())
    } else {
        Err(format!("mean {m} outside [{}, {}]", s[0], s[s.len() - 1]))
    }
}

type Q = Ratio<i128>;

/// Exact lower-tail and upper-tail averages of integer atoms with integer
/// counts at level `num/den`: walk the cumulative mass and cut the boundary
/// atom so that exactly `num/den` of the mass lies below.
pub fn oracle_tails(supports: &[i64], counts: &[u32], num: i64, den: i64) -> (Q, Q) {
    let mut atoms: Vec<(i64, u32)> = supports.iter().copied().zip(counts.iter().copied()).collect();
    atoms.sort();
    let total: i128 = counts.iter().map(|&c| c as i128).sum();
    let p = Q::new(num as i128, den as i128);
    let cut = p * Q::from_integer(total);
    let mut below = Q::from_integer(0);
    let mut lower_sum = Q::from_integer(0);
    let mut upper_sum = Q::from_integer(0);
    for (x, c) in atoms {
        let c = Q::from_integer(c as i128);
        let take = if below + c <= cut {
            c
        } else if below >= cut {
            Q::from_integer(0)
        } else {
            cut - below
        };
        below += take;
        lower_sum += take * Q::from_integer(x as i128);
        upper_sum += (c - take) * Q::from_integer(x as i128);
    }
    let total = Q::from_integer(total);
    let tm = lower_sum / (p * total);
    let cvar = upper_sum / ((Q::from_integer(1) - p) * total);
    (tm, cvar)
}

pub fn ratio_to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

pub fn check_against_oracle(supports: &[i64], counts: &[u32], num: i64, den: i64) -> Result<(), String> {
    let xs: Vec<f64> = supports.iter().map(|&x| x as f64).collect();
    let dist = proportional(&xs, counts);
    let p = num as f64 / den as f64;
    let (tm, cvar) = oracle_tails(supports, counts, num, den);
    let got_tm = q_truncated_mean(&dist, p).unwrap().value();
    let got_cvar = q_cvar(&dist, p).unwrap().value();
    let (e1, e2) = ((got_tm - ratio_to_f64(tm)).abs(), (got_cvar - ratio_to_f64(cvar)).abs());
    if e1 <= 1e-12 && e2 <= 1e-12 {
        Ok(())
    } else {
        Err(format!(
            "atoms {supports:?} counts {counts:?} p {num}/{den}: truncated mean off by {e1}, cvar off by {e2}"
        ))
    }
}
