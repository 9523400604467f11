//! Monte-Carlo sampling of Wigner-type matrices with a given variance profile.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::VarianceMatrix;
use crate::par;

#[derive(Debug, Error, PartialEq)]
pub enum McError {
    #[error("invalid Monte-Carlo configuration: {0}")]
    InvalidConfig(String),
    #[error("power iteration did not converge after {iterations} iterations (best estimate {estimate})")]
    NoConvergence { iterations: usize, estimate: f64 },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    #[default]
    RealSymmetric,
    ComplexHermitian,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub trials: usize,
    pub seed: u64,
    pub ensemble: Ensemble,
    pub power_tol: f64,
    pub power_max_iter: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            trials: 10,
            seed: 1,
            ensemble: Ensemble::RealSymmetric,
            power_tol: 1e-12,
            power_max_iter: 100_000,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<(), McError> {
        if self.trials == 0 {
            return Err(McError::InvalidConfig("trials must be at least 1".into()));
        }
        if !(self.power_tol > 0.0 && self.power_tol.is_finite()) {
            return Err(McError::InvalidConfig(format!(
                "power_tol must be positive, got {}",
                self.power_tol
            )));
        }
        if self.power_max_iter == 0 {
            return Err(McError::InvalidConfig("power_max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McResult {
    pub trials: usize,
    pub seed: u64,
    pub ensemble: Ensemble,
    /// `|lambda|_max` of every converged trial, in trial order.
    pub per_trial: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation with `n - 1` denominator; 0 when fewer than
    /// two trials converged, in which case `std_defined` is false.
    pub std: f64,
    pub std_defined: bool,
    pub failures: usize,
    pub elapsed: f64,
}

/// A dense sampled matrix, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub enum SampledMatrix {
    Real { n: usize, a: Vec<f64> },
    Complex { n: usize, a: Vec<Complex64> },
}

impl SampledMatrix {
    pub fn n(&self) -> usize {
        match self {
            SampledMatrix::Real { n, .. } | SampledMatrix::Complex { n, .. } => *n,
        }
    }

    /// Entry `(x, y)` as a complex number.
    pub fn get(&self, x: usize, y: usize) -> Complex64 {
        match self {
            SampledMatrix::Real { n, a } => Complex64::new(a[x * n + y], 0.0),
            SampledMatrix::Complex { n, a } => a[x * n + y],
        }
    }

    fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        match self {
            SampledMatrix::Real { n, a } => {
                for (row, o) in a.chunks_exact(*n).zip(out.iter_mut()) {
                    let (mut re, mut im) = (0.0, 0.0);
                    for (&h, vi) in row.iter().zip(v) {
                        re += h * vi.re;
                        im += h * vi.im;
                    }
                    *o = Complex64::new(re, im);
                }
            }
            SampledMatrix::Complex { n, a } => {
                for (row, o) in a.chunks_exact(*n).zip(out.iter_mut()) {
                    *o = row.iter().zip(v).map(|(h, vi)| h * vi).sum();
                }
            }
        }
    }
}

/// RNG for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draws `H` with independent centered Gaussian entries, `E|H_xy|^2 = S_xy`.
pub fn sample_matrix<R: Rng + ?Sized>(s: &VarianceMatrix, ensemble: Ensemble, rng: &mut R) -> SampledMatrix {
    let n = s.n();
    match ensemble {
        Ensemble::RealSymmetric => {
            let mut a = vec![0.0; n * n];
            for x in 0..n {
                for y in x..n {
                    let g: f64 = rng.sample(StandardNormal);
                    let h = g * s.get(x, y).sqrt();
                    a[x * n + y] = h;
                    a[y * n + x] = h;
                }
            }
            SampledMatrix::Real { n, a }
        }
        Ensemble::ComplexHermitian => {
            let mut a = vec![Complex64::new(0.0, 0.0); n * n];
            for x in 0..n {
                let g: f64 = rng.sample(StandardNormal);
                a[x * n + x] = Complex64::new(g * s.get(x, x).sqrt(), 0.0);
                for y in x + 1..n {
                    let sd = (0.5 * s.get(x, y)).sqrt();
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    let h = Complex64::new(re * sd, im * sd);
                    a[x * n + y] = h;
                    a[y * n + x] = h.conj();
                }
            }
            SampledMatrix::Complex { n, a }
        }
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// `|lambda|_max` of a symmetric or hermitian `h` by power iteration on
/// `v -> H(Hv)`. The Rayleigh quotient of `H^2` at a unit `v` is `|Hv|^2`;
/// iteration stops once two successive quotients agree to relative `tol`.
pub fn spectral_radius<R: Rng + ?Sized>(
    h: &SampledMatrix,
    tol: f64,
    max_iter: usize,
    rng: &mut R,
) -> Result<f64, McError> {
    let n = h.n();
    if n == 0 {
        return Ok(0.0);
    }
    let complex = matches!(h, SampledMatrix::Complex { .. });
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = if complex { rng.sample(StandardNormal) } else { 0.0 };
            Complex64::new(re, im)
        })
        .collect();
    let scale = norm_sqr(&v).sqrt();
    v.iter_mut().for_each(|c| *c /= scale);
    let mut hv = vec![Complex64::new(0.0, 0.0); n];
    let mut previous = f64::NAN;
    for _ in 0..max_iter {
        h.apply(&v, &mut hv);
        let rq = norm_sqr(&hv);
        if rq == 0.0 {
            // v lies in the kernel; only possible for a zero matrix up to measure zero
            return Ok(0.0);
        }
        if (rq - previous).abs() <= tol * rq {
            return Ok(rq.sqrt());
        }
        previous = rq;
        h.apply(&hv, &mut v);
        let scale = norm_sqr(&v).sqrt();
        if scale == 0.0 {
            return Ok(0.0);
        }
        v.iter_mut().for_each(|c| *c /= scale);
    }
    Err(McError::NoConvergence {
        iterations: max_iter,
        estimate: previous.sqrt(),
    })
}

/// `trials` independent samples of `|lambda|_max`, each with its own RNG
/// stream so the result does not depend on the thread schedule.
pub fn mc_experiment(s: &VarianceMatrix, cfg: &McConfig) -> Result<McResult, McError> {
    cfg.validate()?;
    let start = Instant::now();
    let outcomes = par::map_indexed(cfg.trials, |t| {
        let mut rng = trial_rng(cfg.seed, t as u64);
        let h = sample_matrix(s, cfg.ensemble, &mut rng);
        spectral_radius(&h, cfg.power_tol, cfg.power_max_iter, &mut rng)
    });
    let mut per_trial = Vec::with_capacity(cfg.trials);
    let mut failures = 0;
    let mut first_failure = None;
    for (t, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(v) => per_trial.push(v),
            Err(e) => {
                log::warn!("trial {t}: {e}");
                failures += 1;
                first_failure.get_or_insert(e);
            }
        }
    }
    if per_trial.is_empty() {
        return Err(first_failure.expect("at least one trial ran"));
    }
    let (mean, std, std_defined) = mean_std(&per_trial);
    Ok(McResult {
        trials: cfg.trials,
        seed: cfg.seed,
        ensemble: cfg.ensemble,
        per_trial,
        mean,
        std,
        std_defined,
        failures,
        elapsed: start.elapsed().as_secs_f64(),
    })
}

/// Mean and `n - 1` sample standard deviation; the flag is false when the
/// standard deviation is undefined and reported as 0.
pub fn mean_std(values: &[f64]) -> (f64, f64, bool) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0, false);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt(), true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(n: usize, a: Vec<f64>) -> SampledMatrix {
        SampledMatrix::Real { n, a }
    }

    #[test]
    fn swap_matrix() {
        let h = real(2, vec![0.0, 1.0, 1.0, 0.0]);
        let r = spectral_radius(&h, 1e-14, 1000, &mut trial_rng(3, 0)).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_picks_largest_magnitude() {
        let h = real(3, vec![3.0, 0.0, 0.0, 0.0, -5.0, 0.0, 0.0, 0.0, 2.0]);
        let r = spectral_radius(&h, 1e-15, 10_000, &mut trial_rng(3, 0)).unwrap();
        assert!((r - 5.0).abs() < 1e-10, "{r}");
    }

    #[test]
    fn hermitian_two_by_two() {
        // [[0, i], [-i, 0]] has eigenvalues +-1
        let i = Complex64::new(0.0, 1.0);
        let zero = Complex64::new(0.0, 0.0);
        let h = SampledMatrix::Complex {
            n: 2,
            a: vec![zero, i, -i, zero],
        };
        let r = spectral_radius(&h, 1e-14, 1000, &mut trial_rng(0, 0)).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_profile_gives_zero_with_flag() {
        let s = VarianceMatrix::zeros(4).unwrap();
        let cfg = McConfig {
            trials: 1,
            ..McConfig::default()
        };
        let r = mc_experiment(&s, &cfg).unwrap();
        assert_eq!(r.per_trial, vec![0.0]);
        assert_eq!((r.mean, r.std, r.std_defined), (0.0, 0.0, false));
    }

    #[test]
    fn invalid_configs() {
        let s = VarianceMatrix::wigner(3).unwrap();
        for cfg in [
            McConfig {
                trials: 0,
                ..McConfig::default()
            },
            McConfig {
                power_tol: 0.0,
                ..McConfig::default()
            },
            McConfig {
                power_tol: f64::NAN,
                ..McConfig::default()
            },
        ] {
            assert!(matches!(mc_experiment(&s, &cfg), Err(McError::InvalidConfig(_))));
        }
    }

    #[test]
    fn no_convergence_is_counted() {
        let s = VarianceMatrix::wigner(30).unwrap();
        let cfg = McConfig {
            trials: 2,
            power_max_iter: 1,
            ..McConfig::default()
        };
        assert!(matches!(mc_experiment(&s, &cfg), Err(McError::NoConvergence { .. })));
    }

    #[test]
    fn streams_are_distinct_and_reproducible() {
        let s = VarianceMatrix::wigner(5).unwrap();
        let a = sample_matrix(&s, Ensemble::RealSymmetric, &mut trial_rng(9, 0));
        let b = sample_matrix(&s, Ensemble::RealSymmetric, &mut trial_rng(9, 0));
        let c = sample_matrix(&s, Ensemble::RealSymmetric, &mut trial_rng(9, 1));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn hermitian_sample_structure() {
        let s = VarianceMatrix::wigner(6).unwrap();
        let h = sample_matrix(&s, Ensemble::ComplexHermitian, &mut trial_rng(2, 0));
        for x in 0..6 {
            assert_eq!(h.get(x, x).im, 0.0);
            for y in 0..6 {
                assert_eq!(h.get(x, y), h.get(y, x).conj());
            }
        }
    }

    #[test]
    fn sample_std() {
        let (m, s, ok) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(ok);
    }

    #[test]
    fn ensemble_json_names() {
        assert_eq!(
            serde_json::to_string(&Ensemble::ComplexHermitian).unwrap(),
            "\"complex-hermitian\""
        );
    }
}
