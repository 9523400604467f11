//! The improved support bound `2 ||S||^{1/2} / w_c(J)`.
//!
//! With `q = w/2`,
//!
//! ```text
//! phi_J(w) = 1 - q * (1 + sum_{j=1..J} q^j z_j + sum_{j>J} q^j)
//! ```
//!
//! and `w_c(J)` is its smallest positive root. The tail is a geometric series
//! and is always summed in closed form, `q^{J+1} / (1 - q)`; cutting it off
//! would move the root to the right and produce a bound that is too small.
//!
//! `phi_J` is strictly decreasing on `[0, 2)` with `phi_J(0) = 1` and
//! `phi_J(w) -> -inf` as `w -> 2`, so the root is unique and bisection always
//! brackets it. Since every `z_j <= 1`, `phi_J(1) >= 0` and hence `w_c >= 1`.
//!
//! There is no separate `J = infinity` mode: once `(w_c/2)^J` is below machine
//! precision, further ratios do not move the root. For `w_c` near 1 that
//! happens around `J = 53`.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{LinalgError, NormSequence, VarianceMatrix};

pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum BoundError {
    #[error("phi_J is only defined for 0 <= w < 2, got w = {0}")]
    Domain(f64),
    #[error("root tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("bisection failed to bracket a root (phi(lo) = {phi_lo}, phi(hi) = {phi_hi})")]
    NoBracket { phi_lo: f64, phi_hi: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `phi_J(w)` with `J = z.len()`.
pub fn phi(w: f64, z: &NormSequence) -> Result<f64, BoundError> {
    if !(0.0..2.0).contains(&w) {
        return Err(BoundError::Domain(w));
    }
    Ok(phi_unchecked(w, z.ratios()))
}

fn phi_unchecked(w: f64, z: &[f64]) -> f64 {
    let q = 0.5 * w;
    let mut power = 1.0;
    let mut sum = 1.0;
    for &zj in z {
        power *= q;
        sum += power * zj;
    }
    let tail = power * q / (1.0 - q);
    1.0 - q * (sum + tail)
}

/// Result of the root search: `phi(lo) > 0 >= phi(hi)` and `hi - lo <= tol`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub lo: f64,
    pub hi: f64,
}

impl CriticalPoint {
    /// The lower end of the bracket. Using it for the bound errs on the
    /// side of a larger (still valid) bound.
    pub fn w_c(&self) -> f64 {
        self.lo
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Smallest positive root of `phi_J` by bisection on `(0, 2)`.
pub fn critical_w(z: &NormSequence, tol: f64) -> Result<CriticalPoint, BoundError> {
    if !(tol > 0.0) {
        return Err(BoundError::InvalidTolerance(tol));
    }
    let ratios = z.ratios();
    let mut lo = 0.0;
    let mut hi = 2.0 - 4.0 * f64::EPSILON;
    let phi_lo = phi_unchecked(lo, ratios);
    let phi_hi = phi_unchecked(hi, ratios);
    if !(phi_lo > 0.0 && phi_hi <= 0.0) {
        return Err(BoundError::NoBracket { phi_lo, phi_hi });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi_unchecked(mid, ratios) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CriticalPoint { lo, hi })
}

/// Everything needed to reproduce a support bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    #[serde(rename = "J")]
    pub j: usize,
    pub norm_s: f64,
    pub w_c: f64,
    pub trivial_bound: f64,
    pub improved_bound: f64,
    pub z: Vec<f64>,
    pub tol: f64,
    /// Bisection bracket around the root.
    pub bracket: CriticalPoint,
}

/// `max supp rho <= 2 ||S||^{1/2} / w_c(J)`.
pub fn support_bound(s: &VarianceMatrix, big_j: usize, tol: f64) -> Result<BoundReport, BoundError> {
    let z = s.norm_sequence(big_j)?;
    bound_from_sequence(s.n(), &z, tol)
}

pub fn bound_from_sequence(n: usize, z: &NormSequence, tol: f64) -> Result<BoundReport, BoundError> {
    let bracket = critical_w(z, tol)?;
    let trivial_bound = 2.0 * z.norm_s.sqrt();
    let w_c = bracket.w_c();
    // w_c >= 1 exactly because every z_j <= 1; the clamp only absorbs the
    // bisection bracket straddling 1
    let improved_bound = (trivial_bound / w_c).min(trivial_bound);
    Ok(BoundReport {
        n,
        j: z.len(),
        norm_s: z.norm_s,
        w_c,
        trivial_bound,
        improved_bound,
        z: z.ratios().to_vec(),
        tol,
        bracket,
    })
}
