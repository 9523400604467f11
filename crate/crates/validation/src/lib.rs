//! Shared fixtures and reporting for the acceptance run.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use specbound::linalg::{gram_linearize, VarianceMatrix};

/// Symmetric profile with i.i.d. uniform entries in `[0, 2/n)`.
pub fn seeded_profile(n: usize, seed: u64) -> VarianceMatrix {
    VarianceMatrix::seeded_uniform(n, seed).unwrap()
}

/// Linearization of an `m x n` rectangular profile with uniform entries in
/// `[0, 2/(m+n))`.
pub fn seeded_gram(m: usize, n: usize, seed: u64) -> VarianceMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 2.0 / (m + n) as f64;
    let rect: Vec<f64> = (0..m * n).map(|_| rng.random_range(0.0..scale)).collect();
    gram_linearize(m, n, &rect).unwrap()
}

/// One acceptance criterion: a list of named checks, each pass or fail.
pub struct Criterion {
    pub id: usize,
    pub title: &'static str,
    checks: Vec<(bool, String)>,
}

impl Criterion {
    pub fn new(id: usize, title: &'static str) -> Self {
        Self {
            id,
            title,
            checks: Vec::new(),
        }
    }

    pub fn check(&mut self, ok: bool, detail: impl Into<String>) -> &mut Self {
        self.checks.push((ok, detail.into()));
        self
    }

    /// `|value - target| <= tol`.
    pub fn near(&mut self, name: &str, value: f64, target: f64, tol: f64) -> &mut Self {
        let ok = (value - target).abs() <= tol;
        self.check(ok, format!("{name} = {value:.6} (want {target} +- {tol})"))
    }

    /// `lo <= value <= hi`.
    pub fn within(&mut self, name: &str, value: f64, lo: f64, hi: f64) -> &mut Self {
        let ok = (lo..=hi).contains(&value);
        self.check(ok, format!("{name} = {value:.6} (want [{lo}, {hi}])"))
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|(ok, _)| *ok)
    }

    /// The verdict line followed by one indented line per check.
    pub fn render(&self) -> String {
        let mut out = format!(
            "{} criterion {}: {}\n",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.title
        );
        for (ok, detail) in &self.checks {
            let _ = writeln!(out, "    [{}] {detail}", if *ok { "ok" } else { "FAILED" });
        }
        out
    }
}
