mod support;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specbound::io::{parse_variance_matrix, to_plain};
use specbound::linalg::{gram_linearize, Construction, VarianceMatrix};
use support::{dense_mul, dense_ratios, max_row_sum, random_profile};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

#[test]
fn seeded_five_by_five_matches_dense_powers() {
    let s = random_profile(5, 11);
    let z = s.norm_sequence(5).unwrap();
    let oracle = dense_ratios(&s, 5);
    for j in 1..=5 {
        assert!(rel(z.z(j), oracle[j - 1]) < 1e-12, "j={j}: {} vs {}", z.z(j), oracle[j - 1]);
    }
    assert!(rel(z.norm_s, max_row_sum(s.entries(), 5)) < 1e-15);
}

#[test]
fn gram_second_ratio_matches_block_products() {
    let (m, n) = (4, 7);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rect: Vec<f64> = (0..m * n).map(|_| rng.random_range(0.0..1.0)).collect();
    let big = gram_linearize(m, n, &rect).unwrap();
    // S S^T is m x m, S^T S is n x n
    let mut sst = vec![0.0; m * m];
    let mut sts = vec![0.0; n * n];
    for i in 0..m {
        for j in 0..m {
            sst[i * m + j] = (0..n).map(|k| rect[i * n + k] * rect[j * n + k]).sum();
        }
    }
    for i in 0..n {
        for j in 0..n {
            sts[i * n + j] = (0..m).map(|k| rect[k * n + i] * rect[k * n + j]).sum();
        }
    }
    let expected = max_row_sum(&sst, m).max(max_row_sum(&sts, n)) / big.inf_norm().powi(2);
    let z = big.norm_sequence(2).unwrap();
    assert!(rel(z.z(2), expected) < 1e-12);
    let dense = dense_mul(big.entries(), big.entries(), m + n);
    assert!(rel(max_row_sum(&dense, m + n), max_row_sum(&sst, m).max(max_row_sum(&sts, n))) < 1e-12);
}

#[test]
fn exponential_profile_norm() {
    // zero-based indices: ||S|| = e^{(N-1)/N} (1/N) sum_j e^{j/N}
    let n = 500;
    let s = VarianceMatrix::exp_profile(n).unwrap();
    let nf = n as f64;
    let sum: f64 = (0..n).map(|j| (j as f64 / nf).exp()).sum();
    let expected = ((nf - 1.0) / nf).exp() * sum / nf;
    assert!(rel(s.inf_norm(), expected) < 1e-13);
    assert!((2.0 * s.inf_norm().sqrt() - 4.316).abs() < 1e-3);
}

#[test]
fn repair_mode_symmetrizes_files() {
    let text = "3\n0 1 0.5\n1.2 0 -0.1\n0.5 0 0\n";
    assert!(parse_variance_matrix(text, Construction::Strict).is_err());
    let s = parse_variance_matrix(text, Construction::Repair).unwrap();
    assert!((s.get(0, 1) - 1.1).abs() < 1e-15);
    assert_eq!(s.get(1, 2), 0.0);
    let again = parse_variance_matrix(&to_plain(&s), Construction::Strict).unwrap();
    assert_eq!(again, s);
}

fn profile_strategy() -> impl Strategy<Value = VarianceMatrix> {
    (1usize..=8).prop_flat_map(|n| {
        proptest::collection::vec(0.0f64..1.0, n * n).prop_map(move |raw| {
            VarianceMatrix::from_fn(n, |x, y| raw[x.min(y) * n + x.max(y)]).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn iteration_agrees_with_dense_powers(s in profile_strategy()) {
        prop_assume!(!s.is_zero());
        let z = s.norm_sequence(10).unwrap();
        let oracle = dense_ratios(&s, 10);
        for j in 1..=10 {
            let expected = oracle[j - 1].min(1.0);
            prop_assert!(rel(z.z(j), expected) < 1e-12 || (z.z(j) < 1e-300 && expected < 1e-300),
                "j={} {} vs {}", j, z.z(j), expected);
        }
    }

    #[test]
    fn ratios_lie_in_unit_interval(s in profile_strategy()) {
        prop_assume!(!s.is_zero());
        let z = s.norm_sequence(12).unwrap();
        prop_assert_eq!(z.z(1), 1.0);
        for &r in z.ratios() {
            prop_assert!((0.0..=1.0).contains(&r));
        }
    }

    #[test]
    fn submultiplicativity(s in profile_strategy()) {
        prop_assume!(!s.is_zero());
        let z = s.norm_sequence(8).unwrap();
        for i in 1..=4 {
            for j in 1..=4 {
                prop_assert!(z.z(i + j) <= z.z(i) * z.z(j) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn ratios_are_scale_invariant(s in profile_strategy(), c in 0.01f64..100.0) {
        prop_assume!(!s.is_zero());
        let a = s.norm_sequence(6).unwrap();
        let b = s.scaled(c).unwrap().norm_sequence(6).unwrap();
        prop_assert!(rel(b.norm_s, c * a.norm_s) < 1e-13);
        for j in 1..=6 {
            prop_assert!((a.z(j) - b.z(j)).abs() <= 1e-12 * a.z(j).max(1e-300));
        }
    }
}
