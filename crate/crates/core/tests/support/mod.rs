//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specbound::linalg::VarianceMatrix;

/// Symmetric profile with i.i.d. uniform entries in `[0, 2/n)`.
pub fn random_profile(n: usize, seed: u64) -> VarianceMatrix {
    VarianceMatrix::seeded_uniform(n, seed).unwrap()
}

pub fn dense_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

pub fn max_row_sum(a: &[f64], n: usize) -> f64 {
    a.chunks(n)
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `||S^j|| / ||S||^j` for `j = 1..=jmax` from explicit matrix powers.
pub fn dense_ratios(s: &VarianceMatrix, jmax: usize) -> Vec<f64> {
    let n = s.n();
    let norm = max_row_sum(s.entries(), n);
    let mut power = s.entries().to_vec();
    let mut out = vec![1.0];
    for j in 2..=jmax {
        power = dense_mul(&power, s.entries(), n);
        out.push(max_row_sum(&power, n) / norm.powi(j as i32));
    }
    out
}

/// All eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// sorted ascending.
pub fn jacobi_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let mut a = a.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].powi(2))
            .sum();
        let scale: f64 = a.iter().map(|v| v * v).sum();
        if off <= 1e-30 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

pub fn random_symmetric(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = vec![0.0; n * n];
    for x in 0..n {
        for y in x..n {
            let v: f64 = rng.random_range(-1.0..1.0);
            a[x * n + y] = v;
            a[y * n + x] = v;
        }
    }
    a
}
