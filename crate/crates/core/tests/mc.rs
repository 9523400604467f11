mod support;

use proptest::prelude::*;
use specbound::bound::{support_bound, DEFAULT_TOL};
use specbound::linalg::VarianceMatrix;
use specbound::mc::{
    mc_experiment, mean_std, sample_matrix, spectral_radius, trial_rng, Ensemble, McConfig, SampledMatrix,
};
use support::{jacobi_eigenvalues, random_profile, random_symmetric};

fn oracle_radius(a: &[f64], n: usize) -> f64 {
    let e = jacobi_eigenvalues(a, n);
    e[0].abs().max(e[n - 1].abs())
}

#[test]
fn fifty_by_fifty_against_jacobi() {
    let n = 50;
    let a = random_symmetric(n, 50);
    let h = SampledMatrix::Real { n, a: a.clone() };
    let r = spectral_radius(&h, 1e-15, 1_000_000, &mut trial_rng(1, 0)).unwrap();
    let expected = oracle_radius(&a, n);
    assert!((r - expected).abs() < 1e-8, "{r} vs {expected}");
}

#[test]
fn hermitian_against_real_embedding() {
    // A + iB is unitarily similar to a block of [[A, -B], [B, A]]
    let n = 20;
    let s = random_profile(n, 9);
    let h = sample_matrix(&s, Ensemble::ComplexHermitian, &mut trial_rng(4, 0));
    let mut big = vec![0.0; 4 * n * n];
    for x in 0..n {
        for y in 0..n {
            let c = h.get(x, y);
            big[x * 2 * n + y] = c.re;
            big[x * 2 * n + n + y] = -c.im;
            big[(n + x) * 2 * n + y] = c.im;
            big[(n + x) * 2 * n + n + y] = c.re;
        }
    }
    let expected = oracle_radius(&big, 2 * n);
    let r = spectral_radius(&h, 1e-15, 1_000_000, &mut trial_rng(4, 1)).unwrap();
    assert!((r - expected).abs() < 1e-8, "{r} vs {expected}");
}

#[test]
fn entry_variances_match_profile() {
    let n = 3;
    let s = VarianceMatrix::from_fn(n, |x, y| [[0.5, 1.0, 0.2], [1.0, 2.0, 0.0], [0.2, 0.0, 1.5]][x][y]).unwrap();
    let draws = 100_000;
    for ensemble in [Ensemble::RealSymmetric, Ensemble::ComplexHermitian] {
        let mut rng = trial_rng(123, 0);
        let mut sum = vec![(0.0, 0.0); n * n];
        let mut sq = vec![0.0; n * n];
        for _ in 0..draws {
            let h = sample_matrix(&s, ensemble, &mut rng);
            for x in 0..n {
                for y in 0..n {
                    let c = h.get(x, y);
                    sum[x * n + y].0 += c.re;
                    sum[x * n + y].1 += c.im;
                    sq[x * n + y] += c.norm_sqr();
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                let v = s.get(x, y);
                let var = sq[x * n + y] / draws as f64;
                if v == 0.0 {
                    assert_eq!(var, 0.0);
                    continue;
                }
                assert!((var - v).abs() < 0.03 * v, "{ensemble:?} ({x},{y}): {var} vs {v}");
                let sigma = (v / draws as f64).sqrt();
                let (re, im) = sum[x * n + y];
                assert!((re / draws as f64).abs() < 3.0 * sigma);
                assert!((im / draws as f64).abs() < 3.0 * sigma);
            }
        }
    }
}

#[test]
fn result_does_not_depend_on_schedule() {
    let s = random_profile(40, 3);
    let cfg = McConfig {
        trials: 6,
        seed: 99,
        ..McConfig::default()
    };
    let a = mc_experiment(&s, &cfg).unwrap();
    let b = mc_experiment(&s, &cfg).unwrap();
    assert_eq!(a.per_trial, b.per_trial);
    assert_eq!((a.mean, a.std), (b.mean, b.std));
    // rerun trials one by one in reverse order
    let mut manual: Vec<f64> = (0..cfg.trials as u64)
        .rev()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t);
            let h = sample_matrix(&s, cfg.ensemble, &mut rng);
            spectral_radius(&h, cfg.power_tol, cfg.power_max_iter, &mut rng).unwrap()
        })
        .collect();
    manual.reverse();
    assert_eq!(manual, a.per_trial);
    let (mean, std, _) = mean_std(&a.per_trial);
    assert_eq!((mean, std), (a.mean, a.std));
    assert!(a.per_trial.iter().all(|&v| v >= 0.0));
}

#[test]
fn json_shape() {
    let s = VarianceMatrix::wigner(10).unwrap();
    let r = mc_experiment(&s, &McConfig { trials: 2, ..McConfig::default() }).unwrap();
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    for key in ["trials", "seed", "ensemble", "per_trial", "mean", "std", "failures"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["ensemble"], "real-symmetric");
}

#[test]
fn sample_means_stay_below_bound() {
    for (s, trials) in [
        (VarianceMatrix::wigner(200).unwrap(), 4),
        (random_profile(150, 5), 4),
        (VarianceMatrix::exp_profile(150).unwrap(), 4),
    ] {
        let r = mc_experiment(&s, &McConfig { trials, ..McConfig::default() }).unwrap();
        let b = support_bound(&s, 50, DEFAULT_TOL).unwrap();
        let slack = 3.0 * r.std / (trials as f64).sqrt() + 0.1;
        assert!(r.mean <= b.improved_bound + slack, "{} vs {}", r.mean, b.improved_bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn radius_matches_jacobi(n in 1usize..=60, seed in 0u64..10_000) {
        let a = random_symmetric(n, seed);
        let h = SampledMatrix::Real { n, a: a.clone() };
        let r = spectral_radius(&h, 1e-15, 2_000_000, &mut trial_rng(seed, 7)).unwrap();
        let expected = oracle_radius(&a, n);
        prop_assert!((r - expected).abs() < 1e-8, "n={} {} vs {}", n, r, expected);
    }
}
