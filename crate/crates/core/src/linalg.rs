//! Variance profiles and the norms of their powers.
//!
//! Throughout, `||A||` is the operator norm induced by the maximum norm,
//! i.e. the largest absolute row sum. Variance profiles are entrywise
//! nonnegative, so `||A||` is simply the largest row sum and
//! `||S^j|| = max_x (S^j 1)_x`. The norm sequence is therefore computed by
//! iterating a vector instead of forming matrix powers.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::par;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix dimension must be at least 1")]
    Empty,
    #[error("expected {expected} entries for the given shape, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("entry ({x},{y}) = {value} is not finite")]
    NonFinite { x: usize, y: usize, value: f64 },
    #[error("entry ({x},{y}) = {value} is negative")]
    Negative { x: usize, y: usize, value: f64 },
    #[error("matrix is not symmetric: S[{x}][{y}] = {a} but S[{y}][{x}] = {b}")]
    Asymmetric { x: usize, y: usize, a: f64, b: f64 },
    #[error("the variance profile is identically zero, so z_j is undefined")]
    ZeroMatrix,
    #[error("norm sequence needs J >= 1")]
    ZeroLength,
    #[error("invalid norm ratio z_{j} = {value}; ratios must lie in (0, 1]")]
    InvalidRatio { j: usize, value: f64 },
}

/// How [`VarianceMatrix::with_construction`] treats malformed input.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Construction {
    /// Reject asymmetric or negative entries.
    #[default]
    Strict,
    /// Average `S[x][y]` with `S[y][x]`, clamp negatives to zero and log a
    /// warning for every repair.
    Repair,
}

/// A symmetric, entrywise nonnegative `n x n` variance profile, stored dense
/// and row-major. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct VarianceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl VarianceMatrix {
    /// Strict constructor from row-major entries.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self, LinalgError> {
        Self::with_construction(n, entries, Construction::Strict)
    }

    pub fn with_construction(
        n: usize,
        mut entries: Vec<f64>,
        mode: Construction,
    ) -> Result<Self, LinalgError> {
        if n == 0 {
            return Err(LinalgError::Empty);
        }
        if entries.len() != n * n {
            return Err(LinalgError::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        for x in 0..n {
            for y in 0..n {
                let value = entries[x * n + y];
                if !value.is_finite() {
                    return Err(LinalgError::NonFinite { x, y, value });
                }
            }
        }
        for x in 0..n {
            for y in x..n {
                let a = entries[x * n + y];
                let b = entries[y * n + x];
                if a != b {
                    match mode {
                        Construction::Strict => {
                            return Err(LinalgError::Asymmetric { x, y, a, b })
                        }
                        Construction::Repair => {
                            log::warn!("symmetrizing S[{x}][{y}] = {a} and S[{y}][{x}] = {b}");
                            let avg = 0.5 * (a + b);
                            entries[x * n + y] = avg;
                            entries[y * n + x] = avg;
                        }
                    }
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                let value = entries[x * n + y];
                if value < 0.0 {
                    match mode {
                        Construction::Strict => return Err(LinalgError::Negative { x, y, value }),
                        Construction::Repair => {
                            log::warn!("clamping negative S[{x}][{y}] = {value} to 0");
                            entries[x * n + y] = 0.0;
                        }
                    }
                }
            }
        }
        Ok(Self { n, entries })
    }

    /// Builds `S[x][y] = f(x, y)` for `x <= y` and mirrors it, so the result
    /// is symmetric by construction. `f` must return nonnegative finite values.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self, LinalgError> {
        if n == 0 {
            return Err(LinalgError::Empty);
        }
        let mut entries = vec![0.0; n * n];
        for x in 0..n {
            for y in x..n {
                let v = f(x, y);
                entries[x * n + y] = v;
                entries[y * n + x] = v;
            }
        }
        Self::new(n, entries)
    }

    /// The Wigner profile `S[x][y] = 1/n`.
    pub fn wigner(n: usize) -> Result<Self, LinalgError> {
        let v = 1.0 / n as f64;
        Self::from_fn(n, |_, _| v)
    }

    /// The exponential profile `S[i][j] = exp((i + j)/n) / n` with zero-based
    /// indices.
    pub fn exp_profile(n: usize) -> Result<Self, LinalgError> {
        let nf = n as f64;
        Self::from_fn(n, |i, j| ((i + j) as f64 / nf).exp() / nf)
    }

    /// Symmetric profile with independent entries uniform in `[0, 2/n)`,
    /// reproducible from `seed`.
    pub fn seeded_uniform(n: usize, seed: u64) -> Result<Self, LinalgError> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut entries = vec![0.0; n * n];
        for x in 0..n {
            for y in x..n {
                let v = rng.random_range(0.0..2.0 / n as f64);
                entries[x * n + y] = v;
                entries[y * n + x] = v;
            }
        }
        Self::new(n, entries)
    }

    pub fn zeros(n: usize) -> Result<Self, LinalgError> {
        Self::from_fn(n, |_, _| 0.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.entries[x * self.n + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.entries[x * self.n..(x + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `c * S` for `c >= 0`.
    pub fn scaled(&self, c: f64) -> Result<Self, LinalgError> {
        Self::new(self.n, self.entries.iter().map(|v| v * c).collect())
    }

    /// The leading `m x m` block.
    pub fn leading_block(&self, m: usize) -> Result<Self, LinalgError> {
        let m = m.min(self.n);
        Self::from_fn(m, |x, y| self.get(x, y))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0)
    }

    /// Row sums, each accumulated left to right.
    pub fn row_sums(&self) -> Vec<f64> {
        self.entries.chunks_exact(self.n).map(|r| r.iter().sum()).collect()
    }

    /// Max-row-sum norm `||S||`.
    pub fn inf_norm(&self) -> f64 {
        self.row_sums().into_iter().fold(0.0, f64::max)
    }

    /// `S v`. Rows may be processed in parallel; each dot product runs in a
    /// fixed order.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        self.matvec_into(v, &mut out);
        out
    }

    pub fn matvec_into(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.n);
        assert_eq!(out.len(), self.n);
        par::fill_indexed(out, |x| dot(self.row(x), v));
    }

    /// `S v` for a complex vector (S is real).
    pub fn matvec_complex_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(v.len(), self.n);
        assert_eq!(out.len(), self.n);
        par::fill_indexed(out, |x| {
            let row = self.row(x);
            let (mut re, mut im) = (0.0, 0.0);
            for (s, m) in row.iter().zip(v) {
                re += s * m.re;
                im += s * m.im;
            }
            Complex64::new(re, im)
        });
    }

    /// The ratios `z_j = ||S^j|| / ||S||^j` for `j = 1..=big_j`.
    ///
    /// Iterates `u_0 = 1`, `u_j = S u_{j-1} / ||S||` and reads
    /// `z_j = max_x u_j[x]`; the per-step normalization keeps every iterate
    /// bounded by one.
    pub fn norm_sequence(&self, big_j: usize) -> Result<NormSequence, LinalgError> {
        if big_j == 0 {
            return Err(LinalgError::ZeroLength);
        }
        let norm_s = self.inf_norm();
        if norm_s == 0.0 {
            return Err(LinalgError::ZeroMatrix);
        }
        let mut u = vec![1.0; self.n];
        let mut next = vec![0.0; self.n];
        let mut z = Vec::with_capacity(big_j);
        for j in 1..=big_j {
            self.matvec_into(&u, &mut next);
            next.iter_mut().for_each(|v| *v /= norm_s);
            std::mem::swap(&mut u, &mut next);
            let zj = if j == 1 {
                1.0
            } else {
                // submultiplicativity; only rounding can push this above 1
                u.iter().copied().fold(0.0, f64::max).min(1.0)
            };
            z.push(zj);
        }
        Ok(NormSequence { norm_s, z })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `||S||` together with the ratios `z_1..z_J`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormSequence {
    pub norm_s: f64,
    z: Vec<f64>,
}

impl NormSequence {
    /// Wraps externally supplied ratios. `z` must be nonempty with
    /// `z_1 == 1` and every entry in `(0, 1]`.
    pub fn from_ratios(norm_s: f64, z: Vec<f64>) -> Result<Self, LinalgError> {
        if z.is_empty() {
            return Err(LinalgError::ZeroLength);
        }
        if !(norm_s > 0.0 && norm_s.is_finite()) {
            return Err(LinalgError::ZeroMatrix);
        }
        for (i, &value) in z.iter().enumerate() {
            let ok = if i == 0 { value == 1.0 } else { value > 0.0 && value <= 1.0 };
            if !ok {
                return Err(LinalgError::InvalidRatio { j: i + 1, value });
            }
        }
        Ok(Self { norm_s, z })
    }

    /// Cutoff `J`.
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// `z_j` for `1 <= j <= J`, and 1 beyond the cutoff.
    pub fn z(&self, j: usize) -> f64 {
        assert!(j >= 1, "z_j is indexed from 1");
        self.z.get(j - 1).copied().unwrap_or(1.0)
    }

    pub fn ratios(&self) -> &[f64] {
        &self.z
    }

    /// The first `big_j` ratios.
    pub fn truncated(&self, big_j: usize) -> Self {
        let big_j = big_j.clamp(1, self.z.len());
        Self {
            norm_s: self.norm_s,
            z: self.z[..big_j].to_vec(),
        }
    }
}

/// Variance profile of the hermitization `[[0, X], [X^*, 0]]` of a
/// rectangular `m x n` matrix `X` whose entry variances are `rect`
/// (row-major). The spectral radius of `X X^*` is the square of that of the
/// linearized matrix, so a bound for the returned profile must be squared.
pub fn gram_linearize(m: usize, n: usize, rect: &[f64]) -> Result<VarianceMatrix, LinalgError> {
    if m == 0 || n == 0 {
        return Err(LinalgError::Empty);
    }
    if rect.len() != m * n {
        return Err(LinalgError::DimensionMismatch {
            expected: m * n,
            got: rect.len(),
        });
    }
    for x in 0..m {
        for y in 0..n {
            let value = rect[x * n + y];
            if !value.is_finite() {
                return Err(LinalgError::NonFinite { x, y, value });
            }
            if value < 0.0 {
                return Err(LinalgError::Negative { x, y, value });
            }
        }
    }
    let size = m + n;
    let mut entries = vec![0.0; size * size];
    for x in 0..m {
        for y in 0..n {
            let v = rect[x * n + y];
            entries[x * size + (m + y)] = v;
            entries[(m + y) * size + x] = v;
        }
    }
    VarianceMatrix::new(size, entries)
}
