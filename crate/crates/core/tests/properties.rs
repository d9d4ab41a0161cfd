use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use sldlab::curve_csv::{format_curve, parse_curve};
use sldlab::estimators::{
    default_k_grid, early_stopped_estimator, filter_value, gd_estimator_closed, gd_estimator_iterative,
    pca_estimator, pinv_estimator, svd_of, GdConfig, Iterations, SpectralRisk,
};
use sldlab::powerlaw::{fit_powerlaw, fit_segmented};
use sldlab::risk::{excess_risk, pca_risk_specialized, risk_closed_form, risk_monte_carlo, LinearEstimator};
use sldlab::subspace::{optimal_estimator, orthonormality_error, sample_basis, sample_dataset, ModelParams};
use sldlab::sweep::{run_sweep_with_threads, EstimatorKind, RiskCurve, Series, SweepConfig};

fn normal_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

fn rel_dist(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// (n, d) with 1 <= d < n.
fn dims(max_n: usize, max_d: usize) -> impl Strategy<Value = (usize, usize)> {
    (2..=max_n).prop_flat_map(move |n| (Just(n), 1..=max_d.min(n - 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sampled_bases_are_orthonormal((n, d) in dims(80, 12), seed in any::<u64>()) {
        let b = sample_basis(n, d, seed).unwrap();
        prop_assert!(orthonormality_error(b.matrix()) <= 1e-10);
    }

    #[test]
    fn datasets_do_not_depend_on_call_order(a in any::<u64>(), b in any::<u64>(), sigma in 0.0..1.0f64) {
        let p = ModelParams::new(3, 12, sigma).unwrap();
        let basis = sample_basis(12, 3, 1).unwrap();
        let first_a = sample_dataset(&p, &basis, 7, a).unwrap();
        let first_b = sample_dataset(&p, &basis, 7, b).unwrap();
        let then_b = sample_dataset(&p, &basis, 7, b).unwrap();
        let then_a = sample_dataset(&p, &basis, 7, a).unwrap();
        prop_assert_eq!(first_a.noisy.as_slice(), then_a.noisy.as_slice());
        prop_assert_eq!(first_a.clean.as_slice(), then_a.clean.as_slice());
        prop_assert_eq!(first_b.noisy.as_slice(), then_b.noisy.as_slice());
    }

    #[test]
    fn dense_and_factored_risks_agree(
        (n, d) in dims(40, 6),
        r in 1usize..8,
        scale in -2.0..2.0f64,
        sigma in 0.0..1.5f64,
        seed in any::<u64>(),
    ) {
        let p = ModelParams::new(d, n, sigma).unwrap();
        let basis = sample_basis(n, d, seed).unwrap();
        let r = r.min(n - 1);
        let b = sample_basis(n, r, seed ^ 0x5bd1e995).unwrap().into_matrix();
        let w = LinearEstimator::try_scaled_projection(scale, b).unwrap();
        let dense = LinearEstimator::dense(w.to_dense()).unwrap();
        let f = risk_closed_form(&w, &basis, &p).unwrap();
        let g = risk_closed_form(&dense, &basis, &p).unwrap();
        prop_assert!((f - g).abs() <= 1e-10, "{} vs {}", f, g);
    }

    #[test]
    fn specialized_pca_risk_matches_generic(
        (n, d) in dims(40, 6),
        count in 1usize..40,
        sigma in 0.0..1.0f64,
        seed in any::<u64>(),
    ) {
        let p = ModelParams::new(d, n, sigma).unwrap();
        let basis = sample_basis(n, d, seed).unwrap();
        let ds = sample_dataset(&p, &basis, count, seed.wrapping_add(1)).unwrap();
        let w = pca_estimator(&svd_of(&ds).unwrap(), &p).unwrap();
        let LinearEstimator::ScaledProjection { basis: u_hat, .. } = &w else {
            panic!("PCA estimator should be a scaled projection");
        };
        let special = pca_risk_specialized(u_hat, &basis, &p).unwrap();
        let generic = risk_closed_form(&w, &basis, &p).unwrap();
        prop_assert!((special - generic).abs() <= 1e-10, "{} vs {}", special, generic);
    }

    #[test]
    fn learned_estimators_never_beat_the_optimum(
        (n, d) in dims(30, 5),
        count in 1usize..40,
        sigma in 0.0..1.0f64,
        k in 0u64..300,
        seed in any::<u64>(),
    ) {
        let p = ModelParams::new(d, n, sigma).unwrap();
        let basis = sample_basis(n, d, seed).unwrap();
        let star = optimal_estimator(&p, &basis).unwrap();
        prop_assert!(excess_risk(&star, &basis, &p).unwrap().abs() <= 1e-12);

        let ds = sample_dataset(&p, &basis, count, seed.wrapping_add(1)).unwrap();
        let cache = svd_of(&ds).unwrap();
        let cfg = GdConfig::default_for(&cache, Iterations::Finite(k));
        let (es, _) = early_stopped_estimator(&cache, &ds.clean, &basis, &p, &default_k_grid(12)).unwrap();
        let estimators = [
            pca_estimator(&cache, &p).unwrap(),
            gd_estimator_closed(&cache, &ds.clean, &cfg).unwrap(),
            pinv_estimator(&cache, &ds.clean).unwrap(),
            es,
        ];
        for w in &estimators {
            prop_assert!(excess_risk(w, &basis, &p).unwrap() >= -1e-10);
        }
    }

    #[test]
    fn oracle_choice_is_the_grid_minimum(
        (n, d) in dims(30, 5),
        count in 1usize..60,
        sigma in 0.0..0.5f64,
        seed in any::<u64>(),
    ) {
        let p = ModelParams::new(d, n, sigma).unwrap();
        let basis = sample_basis(n, d, seed).unwrap();
        let ds = sample_dataset(&p, &basis, count, seed.wrapping_add(1)).unwrap();
        let cache = svd_of(&ds).unwrap();
        let sr = SpectralRisk::new(&cache, &ds.clean, &basis, &p).unwrap();
        let grid = default_k_grid(16);
        let eta = GdConfig::default_for(&cache, Iterations::Infinity).eta;
        let choice = sr.select(eta, &grid).unwrap();
        let min = grid
            .iter()
            .map(|&k| sr.risk(&GdConfig::new(eta, k)).unwrap())
            .fold(f64::INFINITY, f64::min);
        prop_assert_eq!(choice.risk, min);
        let dense = gd_estimator_closed(&cache, &ds.clean, &GdConfig::new(eta, choice.k_opt)).unwrap();
        let direct = risk_closed_form(&dense, &basis, &p).unwrap();
        prop_assert!((direct - choice.risk).abs() <= 1e-10 * (1.0 + direct));
    }

    #[test]
    fn noiseless_pca_reproduces_training_signals(
        (n, d) in dims(30, 5),
        extra in 0usize..30,
        seed in any::<u64>(),
    ) {
        let p = ModelParams::new(d, n, 0.0).unwrap();
        let basis = sample_basis(n, d, seed).unwrap();
        let ds = sample_dataset(&p, &basis, d + extra, seed.wrapping_add(1)).unwrap();
        let w = pca_estimator(&svd_of(&ds).unwrap(), &p).unwrap();
        let resid = w.apply(&ds.clean) - &ds.clean;
        prop_assert!(resid.norm() <= 1e-10 * ds.clean.norm());
    }

    #[test]
    fn filter_grows_toward_inverse_singular_value(s_max in 0.1..100.0f64, frac in 1e-4..1.0f64) {
        let eta = 1.0 / (s_max * s_max);
        let s = frac * s_max;
        let mut prev = 0.0;
        for k in default_k_grid(20) {
            let f = filter_value(s, eta, k);
            prop_assert!(f >= prev, "filter decreased at {:?}", k);
            prev = f;
        }
        prop_assert_eq!(filter_value(s, eta, Iterations::Infinity), 1.0 / s);
        let last = filter_value(s, eta, Iterations::Finite(1 << 20));
        if frac > 0.01 {
            prop_assert!((last - 1.0 / s).abs() <= 1e-12 / s);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn gradient_descent_closed_form_matches_iterations(
        (n, d) in dims(50, 5),
        count in 1usize..=50,
        k in 1u64..=500,
        sigma in 0.0..1.0f64,
        seed in any::<u64>(),
    ) {
        let p = ModelParams::new(d, n, sigma).unwrap();
        let basis = sample_basis(n, d, seed).unwrap();
        let ds = sample_dataset(&p, &basis, count, seed.wrapping_add(1)).unwrap();
        let cache = svd_of(&ds).unwrap();
        let cfg = GdConfig::default_for(&cache, Iterations::Finite(k));
        let closed = gd_estimator_closed(&cache, &ds.clean, &cfg).unwrap().to_dense();
        let iter = gd_estimator_iterative(&ds, &cfg).unwrap().to_dense();
        prop_assert!(rel_dist(&closed, &iter) <= 1e-8);
    }

    #[test]
    fn sweeps_do_not_depend_on_thread_count(base_seed in any::<u64>(), sigma in 0.0..0.5f64) {
        let p = ModelParams::new(2, 8, sigma).unwrap();
        let mut cfg = SweepConfig::new(p, vec![1, 3, 9, 20], EstimatorKind::ALL.to_vec());
        cfg.n_seeds = 3;
        cfg.base_seed = base_seed;
        let one = run_sweep_with_threads(&cfg, 1).unwrap();
        let many = run_sweep_with_threads(&cfg, 4).unwrap();
        prop_assert_eq!(format_curve(&one), format_curve(&many));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn optimum_survives_small_perturbations(sigma in 0.0..2.0f64, seed in any::<u64>()) {
        let (n, d) = (12, 3);
        let p = ModelParams::new(d, n, sigma).unwrap();
        let basis = sample_basis(n, d, seed).unwrap();
        let star = optimal_estimator(&p, &basis).unwrap();
        let mut delta = normal_matrix(&mut ChaCha8Rng::seed_from_u64(seed), n, n);
        delta /= delta.norm();
        let w = LinearEstimator::dense(star.to_dense() + delta * 1e-3).unwrap();
        let r_star = risk_closed_form(&star, &basis, &p).unwrap();
        prop_assert!(risk_closed_form(&w, &basis, &p).unwrap() >= r_star - 1e-12);
    }
}

#[test]
fn monte_carlo_covers_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut covered = 0;
    for trial in 0..100u64 {
        let (n, d) = (20, 3);
        let sigma = rng.random_range(0.05..1.0);
        let p = ModelParams::new(d, n, sigma).unwrap();
        let basis = sample_basis(n, d, trial).unwrap();
        let base = optimal_estimator(&p, &basis).unwrap().to_dense();
        let w = LinearEstimator::dense(base + normal_matrix(&mut rng, n, n) * 0.1).unwrap();
        let rep = risk_monte_carlo(&w, &basis, &p, 4000, rng.random()).unwrap();
        if (rep.monte_carlo_mean - rep.closed_form).abs() <= 3.0 * rep.monte_carlo_se {
            covered += 1;
        }
    }
    assert!(
        covered >= 95,
        "only {covered} of 100 trials within 3 standard errors"
    );
}

fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| lo * (hi / lo).powf(i as f64 / (count - 1) as f64))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn noiseless_power_laws_are_recovered(alpha in -2.0..2.0f64, log_beta in -5.0..5.0f64) {
        let pts: Vec<_> = log_grid(1.0, 1e4, 15)
            .into_iter()
            .map(|n| (n, (log_beta + alpha * n.ln()).exp()))
            .collect();
        let fit = fit_powerlaw(&pts, None).unwrap();
        prop_assert!((fit.alpha - alpha).abs() <= 1e-10);
        prop_assert!((fit.log_beta - log_beta).abs() <= 1e-10);
        prop_assert!((fit.r_squared - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn fits_are_equivariant_under_rescaling(
        values in prop::collection::vec(1e-3..1e3f64, 4..20),
        lambda in 1e-3..1e3f64,
    ) {
        let sizes = log_grid(2.0, 5e3, values.len());
        let pts: Vec<_> = sizes.iter().copied().zip(values.iter().copied()).collect();
        let base = fit_powerlaw(&pts, None).unwrap();

        let scaled: Vec<_> = pts.iter().map(|&(n, v)| (n, v * lambda)).collect();
        let s = fit_powerlaw(&scaled, None).unwrap();
        prop_assert!((s.alpha - base.alpha).abs() <= 1e-12);
        prop_assert!((s.log_beta - base.log_beta - lambda.ln()).abs() <= 1e-10);

        let stretched: Vec<_> = pts.iter().map(|&(n, v)| (n * lambda, v)).collect();
        let t = fit_powerlaw(&stretched, None).unwrap();
        prop_assert!((t.alpha - base.alpha).abs() <= 1e-12);
    }

    #[test]
    fn r_squared_stays_in_unit_interval(values in prop::collection::vec(1e-6..1e6f64, 2..30)) {
        let pts: Vec<_> = log_grid(1.0, 1e5, values.len()).into_iter().zip(values).collect();
        let fit = fit_powerlaw(&pts, None).unwrap();
        prop_assert!((0.0..=1.0).contains(&fit.r_squared));
        prop_assert!(fit.sse >= 0.0);
    }

    #[test]
    fn two_segments_never_fit_worse(values in prop::collection::vec(1e-3..1e3f64, 6..24)) {
        let pts: Vec<_> = log_grid(1.0, 1e5, values.len()).into_iter().zip(values).collect();
        let seg = fit_segmented(&pts, 3, None).unwrap();
        let single = fit_powerlaw(&pts, None).unwrap();
        prop_assert!(seg.total_sse <= single.sse * (1.0 + 1e-12) + 1e-24);
        prop_assert!((seg.total_sse - seg.left.sse - seg.right.sse).abs() <= 1e-12 * (1.0 + seg.total_sse));
    }

    #[test]
    fn curve_csv_round_trips(
        rows in prop::collection::vec((1usize..1_000_000, 0.0..10.0f64, 0.0..1.0f64, -1e-3..1e3f64), 1..12),
    ) {
        let mut rows = rows;
        rows.sort_by_key(|r| r.0);
        rows.dedup_by_key(|r| r.0);
        let curve = RiskCurve {
            train_sizes: rows.iter().map(|r| r.0).collect(),
            series: vec![
                Series {
                    label: "ESGD".into(),
                    mean: rows.iter().map(|r| r.1).collect(),
                    std: rows.iter().map(|r| r.2).collect(),
                    monte_carlo: None,
                },
                Series {
                    label: "PCA".into(),
                    mean: rows.iter().map(|r| r.3).collect(),
                    std: rows.iter().map(|r| r.2 * 0.5).collect(),
                    monte_carlo: Some(rows.iter().map(|r| r.1 + 1.0).collect()),
                },
            ],
            config: None,
        };
        let text = format_curve(&curve);
        let back = parse_curve(&text).unwrap();
        prop_assert_eq!(&back.train_sizes, &curve.train_sizes);
        prop_assert_eq!(&back.series, &curve.series);
        prop_assert_eq!(format_curve(&back), text);
    }
}

#[test]
fn lognormal_noise_keeps_slopes_within_two_hundredths() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sizes = log_grid(10.0, 1e4, 20);
    let mut good = 0;
    for _ in 0..1000 {
        let alpha: f64 = rng.random_range(-2.0..0.5);
        let pts: Vec<_> = sizes
            .iter()
            .map(|&n| {
                let eps: f64 = rng.sample(StandardNormal);
                (n, 3.0 * n.powf(alpha) * (0.05 * eps).exp())
            })
            .collect();
        if (fit_powerlaw(&pts, None).unwrap().alpha - alpha).abs() <= 0.02 {
            good += 1;
        }
    }
    assert!(good >= 950, "{good} of 1000 trials within 0.02");
}
