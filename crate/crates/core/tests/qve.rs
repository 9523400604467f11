mod support;

use num_complex::Complex64;
use proptest::prelude::*;
use specbound::bound::{support_bound, DEFAULT_TOL};
use specbound::combinatorics::catalan;
use specbound::linalg::VarianceMatrix;
use specbound::mc::{sample_matrix, trial_rng, Ensemble, SampledMatrix};
use specbound::qve::{
    density, density_scan, estimate_support, moment_recursion, solve_qve, support_from_moments, QveOptions,
    SupportScan,
};
use support::{jacobi_eigenvalues, random_profile};

#[test]
fn reflection_symmetry() {
    let s = random_profile(12, 4);
    let opts = QveOptions::default();
    for (re, im) in [(0.3, 0.05), (-1.1, 0.2), (2.5, 0.01), (0.0, 1.0)] {
        let z = Complex64::new(re, im);
        let a = solve_qve(&s, z, &opts).unwrap();
        let b = solve_qve(&s, -z.conj(), &opts).unwrap();
        let diff = (b.average() + a.average().conj()).norm();
        assert!(diff < 1e-8, "z={z}: {diff}");
        for (ma, mb) in a.m.iter().zip(&b.m) {
            assert!((mb + ma.conj()).norm() < 1e-8);
        }
    }
}

#[test]
fn solutions_live_in_upper_half_plane() {
    let s = random_profile(9, 8);
    let opts = QveOptions::default();
    for tau in [-3.0, -1.0, 0.0, 0.4, 1.7, 5.0] {
        let p = solve_qve(&s, Complex64::new(tau, 1e-3), &opts).unwrap();
        assert!(p.m.iter().all(|m| m.im > 0.0));
        assert!(p.residual <= opts.tol);
        // residual is recomputable from the returned m
        let sm: Vec<Complex64> = (0..9)
            .map(|x| (0..9).map(|y| s.get(x, y) * p.m[y]).sum())
            .collect();
        let defect = p
            .m
            .iter()
            .zip(&sm)
            .map(|(m, smx)| (m + (p.z + smx).inv()).norm())
            .fold(0.0, f64::max);
        assert!(defect <= 2.0 * opts.tol, "{defect}");
    }
}

#[test]
fn smoothed_density_has_unit_mass() {
    let s = random_profile(16, 21);
    let eta = 1e-3;
    let step = 5e-4;
    let edge = 2.0 * s.inf_norm().sqrt() + 1.0;
    let taus: Vec<f64> = (0..=(2.0 * edge / step) as usize)
        .map(|i| -edge + i as f64 * step)
        .collect();
    let values = density_scan(&s, &taus, eta, &QveOptions::default()).unwrap();
    assert!(values.iter().all(|&(_, d)| d >= 0.0));
    let mass: f64 = values.iter().map(|&(_, d)| d * step).sum();
    assert!((mass - 1.0).abs() < 0.02, "mass {mass}");
}

fn real_entries(h: &SampledMatrix) -> &[f64] {
    match h {
        SampledMatrix::Real { a, .. } => a,
        SampledMatrix::Complex { .. } => unreachable!(),
    }
}

#[test]
fn density_near_zero_matches_sampled_histogram() {
    let n = 100;
    let s = VarianceMatrix::exp_profile(n).unwrap();
    let half = 0.3;
    let trials = 300;
    let mut count = 0usize;
    for t in 0..trials {
        let h = sample_matrix(&s, Ensemble::RealSymmetric, &mut trial_rng(77, t));
        count += jacobi_eigenvalues(real_entries(&h), n)
            .iter()
            .filter(|e| e.abs() < half)
            .count();
    }
    let empirical = count as f64 / (trials as f64 * n as f64 * 2.0 * half);
    let taus: Vec<f64> = (0..=60).map(|i| -half + i as f64 * half / 30.0).collect();
    let scan = density_scan(&s, &taus, 1e-3, &QveOptions::default()).unwrap();
    let qve = scan.iter().map(|&(_, d)| d).sum::<f64>() / taus.len() as f64;
    let at_zero = density(&s, 0.0, 1e-3, &QveOptions::default()).unwrap();
    assert!((empirical - qve).abs() < 0.1 * qve, "histogram {empirical} vs qve {qve}");
    assert!((empirical - at_zero).abs() < 0.1 * at_zero, "histogram {empirical} vs rho(0) {at_zero}");
}

#[test]
fn exponential_profile_edge() {
    let s = VarianceMatrix::exp_profile(500).unwrap();
    let e = estimate_support(&s, &SupportScan::default()).unwrap();
    assert!(e.found);
    assert!((3.55..=3.87).contains(&e.support), "{e:?}");
    // frozen regression value
    assert!((e.support - 3.669).abs() < 1.5e-3, "{}", e.support);
    let b = support_bound(&s, 50, DEFAULT_TOL).unwrap();
    assert!(e.support <= b.improved_bound + e.scan.grid_step);
}

#[test]
fn wigner_moment_proxy() {
    let s = VarianceMatrix::wigner(50).unwrap();
    let t = moment_recursion(&s, 20).unwrap();
    let expected = (catalan(20) as f64).powf(1.0 / 40.0);
    assert!((support_from_moments(&t, 20).unwrap() - expected).abs() < 1e-10);
    assert!((expected - 1.760).abs() < 1e-3);
    for k in 0..=20 {
        for x in 0..50 {
            assert!((t.get(x, k) - catalan(k) as f64).abs() <= 1e-12 * catalan(k) as f64);
        }
    }
}

#[test]
fn moment_proxy_for_exponential_profile() {
    let s = VarianceMatrix::exp_profile(500).unwrap();
    let t = moment_recursion(&s, 30).unwrap();
    let first = support_from_moments(&t, 1).unwrap();
    assert!((first - s.inf_norm().sqrt()).abs() < 1e-12);
    let mut last = 0.0;
    for k in 1..=30 {
        let v = support_from_moments(&t, k).unwrap();
        assert!(v >= last);
        last = v;
    }
    assert!(support_from_moments(&t, 30).unwrap() > support_from_moments(&t, 10).unwrap());
    assert!(last < 3.669);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn scan_respects_bound_and_moments(seed in 0u64..10_000, n in 2usize..10) {
        let s = random_profile(n, seed);
        let e = estimate_support(&s, &SupportScan::default()).unwrap();
        let b = support_bound(&s, 30, DEFAULT_TOL).unwrap();
        prop_assert!(e.found);
        prop_assert!(e.support <= b.improved_bound + e.scan.grid_step);
        let t = moment_recursion(&s, 25).unwrap();
        let mut last = 0.0;
        for k in [1, 5, 10, 25] {
            let v = support_from_moments(&t, k).unwrap();
            prop_assert!(v >= last - 1e-12);
            prop_assert!(v <= e.support + 0.05, "k={} proxy {} scan {}", k, v, e.support);
            last = v;
        }
    }
}
