mod common;

use proptest::prelude::*;
use statrs::distribution::{Beta, ContinuousCDF};

use bis_core::bis::sample_realization;
use bis_core::dirichlet::{
    merge_duplicates, sample_dirichlet, sample_uniform_simplex, sample_unit_dp_stick, DirichletParams,
};
use bis_core::ks::{ks_p_value, ks_statistic, ks_two_sample, ks_two_sample_p_value};
use bis_core::pbox::expected_pbox;
use bis_core::{
    bis_interval, bis_run, interval_estimate, BisConfig, BisSampler, BoundingInterval,
    ExtendedOrderStats, Functional, RngStream,
};
use common::*;

fn atoms(max: usize) -> impl Strategy<Value = (Vec<f64>, Vec<u32>)> {
    (1..=max).prop_flat_map(|n| {
        (
            prop::collection::vec(-100.0..100.0f64, n),
            prop::collection::vec(0u32..10, n).prop_filter("some mass", |c| c.iter().any(|&x| x > 0)),
        )
    })
}

fn dataset() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![0.0..10.0f64, (0u8..10).prop_map(f64::from)], 0..25)
}

fn level() -> impl Strategy<Value = f64> {
    0.001..0.999f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn dominance_is_respected(
        (xs, counts) in atoms(8),
        shifts in prop::collection::vec(prop_oneof![Just(0.0), 0.0..50.0f64], 8),
        p in level(),
    ) {
        let shifts = &shifts[..xs.len()];
        prop_assert!(check_dominance(&xs, &counts, shifts, p).is_ok(), "{:?}", check_dominance(&xs, &counts, shifts, p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn inverse_is_a_galois_connection(
        xs in prop::collection::vec(-50.0..50.0f64, 1..8),
        counts in prop::collection::vec(0u32..8, 7),
        p in prop_oneof![Just(1.0), 1e-9..1.0f64],
    ) {
        let counts = &counts[..xs.len() - 1];
        let d = dyadic(&xs, counts);
        let q = d.generalized_inverse(p).unwrap();
        prop_assert!(d.cdf(q) >= p);
        prop_assert!(d.cdf_left(q) < p);
        for &s in d.supports().iter().filter(|&&s| s < q) {
            prop_assert!(d.cdf(s) < p);
        }
    }

    #[test]
    fn decomposition_identity((xs, counts) in atoms(10), p in level()) {
        let d = proportional(&xs, &counts);
        prop_assert!(check_decomposition(&d, p).is_ok(), "{:?}", check_decomposition(&d, p));
    }

    #[test]
    fn quantile_is_monotone_in_level((xs, counts) in atoms(10), p1 in level(), p2 in level()) {
        let d = proportional(&xs, &counts);
        prop_assert!(check_quantile_monotone(&d, p1, p2).is_ok());
    }

    #[test]
    fn mean_lies_in_the_hull((xs, counts) in atoms(10)) {
        prop_assert!(check_mean_in_hull(&proportional(&xs, &counts)).is_ok());
    }

    #[test]
    fn realisations_are_ordered(data in dataset(), hi_inf in any::<bool>(), seed in any::<u64>(), p in level()) {
        let hi = if hi_inf { f64::INFINITY } else { 10.0 };
        let stats = ExtendedOrderStats::new(&data, BoundingInterval::from_f64(0.0, hi).unwrap()).unwrap();
        let (pts, params) = merge_duplicates(&stats);
        prop_assert_eq!(params.total(), (data.len() + 1) as f64);
        let mut rng = RngStream::new(seed);
        let r = sample_realization(&pts, &params, &mut rng).unwrap();
        let (lower, upper) = (r.lower(), r.upper());
        let mut grid: Vec<_> = lower.supports().iter().chain(upper.supports()).copied().collect();
        grid.extend((0..=40).map(|i| er(i as f64 * 0.25)));
        for x in grid {
            prop_assert!(lower.cdf(x) <= upper.cdf(x) + 1e-12);
        }
        for f in all_functionals(p) {
            match r.bounds(f) {
                Ok((lo, hi)) => prop_assert!(lo <= hi, "{}: {} > {}", f, lo, hi),
                Err(e) => prop_assert!(false, "{}: {}", f, e),
            }
        }
    }

    #[test]
    fn interval_probabilities_are_ordered(
        data in dataset(), seed in any::<u64>(), a in -1.0..11.0f64, len in 0.001..12.0f64,
    ) {
        let s = BisSampler::new(&data, BoundingInterval::from_f64(0.0, 10.0).unwrap()).unwrap();
        let pbox = s.realization(&mut RngStream::new(seed)).pbox();
        let (lp, up) = pbox.interval_probability(er(a), er(a + len)).unwrap();
        prop_assert!(0.0 <= lp && lp <= up && up <= 1.0, "{} {}", lp, up);
        let e = expected_pbox(s.stats());
        let (lp, up) = e.interval_probability(er(a), er(a + len)).unwrap();
        prop_assert!(0.0 <= lp && lp <= up && up <= 1.0);
    }

    #[test]
    fn expected_box_weights_are_uniform(data in dataset()) {
        let stats = ExtendedOrderStats::new(&data, BoundingInterval::from_f64(-1.0, 11.0).unwrap()).unwrap();
        let e = expected_pbox(&stats);
        let k = data.len() + 1;
        // duplicates coalesce, so each support carries a whole multiple of 1/k
        for w in e.lower().weights().iter().chain(e.upper().weights()) {
            let m = (w * k as f64).round();
            prop_assert!(m >= 1.0);
            prop_assert!((w - m / k as f64).abs() <= f64::EPSILON * m);
        }
    }

    #[test]
    fn simplex_draws_are_normalised(n in 1usize..200, seed in any::<u64>()) {
        let w = sample_uniform_simplex(n, &mut RngStream::new(seed)).unwrap();
        prop_assert_eq!(w.len(), n);
        prop_assert!(w.iter().all(|&x| x >= 0.0));
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn dirichlet_draws_are_normalised(alphas in prop::collection::vec(1e-3..20.0f64, 1..30), seed in any::<u64>()) {
        let params = DirichletParams::new(alphas).unwrap();
        let w = sample_dirichlet(&params, &mut RngStream::new(seed));
        prop_assert!(w.iter().all(|&x| x >= 0.0 && x.is_finite()));
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn intervals_nest_in_credibility(data in dataset(), seed in any::<u64>(), c1 in 0.05..0.95f64, dc in 0.0..0.049f64, p in level()) {
        let c2 = c1 + dc;
        let s = BisSampler::new(&data, BoundingInterval::from_f64(0.0, 10.0).unwrap()).unwrap();
        for f in all_functionals(p) {
            let qs = s.run_seq(f, 300, &mut RngStream::new(seed)).unwrap();
            let narrow = interval_estimate(&qs, c1).unwrap();
            let wide = interval_estimate(&qs, c2).unwrap();
            prop_assert!(wide.encloses(&narrow), "{}: {:?} vs {:?}", f, narrow, wide);
        }
    }
}

#[test]
fn runs_do_not_depend_on_thread_count() {
    let bounds = BoundingInterval::from_f64(0.0, f64::INFINITY).unwrap();
    let cfg = BisConfig::new(Functional::Cvar(0.8), 0.9).unwrap().with_resamples(3000).with_seed(5);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| bis_run(&SAMPLE15, bounds, &cfg).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(3));
    assert_eq!(
        bis_interval(&SAMPLE15, bounds, &cfg).unwrap(),
        bis_interval(&SAMPLE15, bounds, &cfg).unwrap()
    );
}

#[test]
fn merged_and_unmerged_samplers_agree() {
    let data = [1.0, 1.0, 1.0, 2.0, 3.0, 3.0, 0.0, 0.0, 4.5];
    let stats = ExtendedOrderStats::new(&data, BoundingInterval::from_f64(0.0, 5.0).unwrap()).unwrap();
    let merged = BisSampler::from_stats(stats.clone());
    let full = BisSampler::unmerged(stats);
    assert!(merged.params().len() < full.params().len());
    for f in [Functional::Mean, Functional::Cvar(0.7), Functional::median()] {
        let a = merged.run_seq(f, 10_000, &mut RngStream::new(11)).unwrap();
        let b = full.run_seq(f, 10_000, &mut RngStream::new(12)).unwrap();
        for (x, y) in [(&a.q_min, &b.q_min), (&a.q_max, &b.q_max)] {
            let x: Vec<f64> = x.iter().map(|v| v.value()).collect();
            let y: Vec<f64> = y.iter().map(|v| v.value()).collect();
            let d = ks_two_sample(&x, &y).unwrap();
            let pv = ks_two_sample_p_value(d, x.len(), y.len());
            assert!(pv > 0.01, "{f}: D = {d}, p = {pv}");
        }
    }
}

#[test]
fn simplex_marginal_is_beta_one_n() {
    let mut rng = RngStream::new(21);
    let first: Vec<f64> = (0..10_000)
        .map(|_| sample_uniform_simplex(16, &mut rng).unwrap()[0])
        .collect();
    let d = ks_statistic(&first, |x| 1.0 - (1.0 - x.clamp(0.0, 1.0)).powi(15)).unwrap();
    assert!(ks_p_value(d, first.len()) > 0.01, "D = {d}");
}

#[test]
fn dirichlet_marginals_are_beta() {
    // a tiny first shape exercises the log-space path; a second shape this
    // small would push draws onto 1.0 exactly, where doubles run out
    for (a, b) in [(0.3, 2.5), (3.5, 1.2), (0.05, 3.0)] {
        let params = DirichletParams::new(vec![a, b]).unwrap();
        let mut rng = RngStream::new(22);
        let xs: Vec<f64> = (0..10_000).map(|_| sample_dirichlet(&params, &mut rng)[0]).collect();
        let beta = Beta::new(a, b).unwrap();
        let d = ks_statistic(&xs, |x| beta.cdf(x)).unwrap();
        assert!(ks_p_value(d, xs.len()) > 0.01, "Beta({a}, {b}): D = {d}");
    }
}

#[test]
fn stick_atoms_are_uniformly_placed() {
    let mut rng = RngStream::new(23);
    let mut locs = Vec::new();
    for _ in 0..200 {
        let d = sample_unit_dp_stick(2.0, 50, &mut rng).unwrap();
        locs.extend(d.supports().iter().map(|s| s.value()));
    }
    let d = ks_statistic(&locs, |x| x.clamp(0.0, 1.0)).unwrap();
    assert!(ks_p_value(d, locs.len()) > 0.01, "D = {d}");
}
