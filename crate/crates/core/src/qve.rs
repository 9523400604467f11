//! The quadratic vector equation
//!
//! ```text
//! -1/m_x = z + sum_y S[x][y] m_y,   Im m_x > 0,
//! ```
//!
//! its smoothed density of states `rho(tau) ~ (1/(pi N)) sum_x Im m_x(tau + i eta)`,
//! a grid scan for the right edge of the density, and the moment recursion
//! obtained by expanding `u_x = -z m_x` in powers of `z^{-2}`.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::VarianceMatrix;
use crate::par;

#[derive(Debug, Error, PartialEq)]
pub enum QveError {
    #[error("spectral parameter must lie in the upper half plane, got {0}")]
    Domain(Complex64),
    #[error("no convergence after {iterations} iterations at z = {z} (residual {residual:e})")]
    NoConvergence {
        z: Complex64,
        iterations: usize,
        residual: f64,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("moment c_(x,{k}) overflowed; rescale S")]
    OverflowGuard { k: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QveOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for QveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200_000,
        }
    }
}

/// A converged solution `m(z)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralProbe {
    pub z: Complex64,
    pub m: Vec<Complex64>,
    pub iterations: usize,
    /// `max_x |m_x + 1/(z + (S m)_x)|`.
    pub residual: f64,
    /// Whether the iteration had to fall back to damping.
    pub damped: bool,
}

impl SpectralProbe {
    /// The averaged Stieltjes transform `(1/N) sum_x m_x`.
    pub fn average(&self) -> Complex64 {
        self.m.iter().sum::<Complex64>() / self.m.len() as f64
    }

    /// `(1/(pi N)) sum_x Im m_x`.
    pub fn density(&self) -> f64 {
        self.m.iter().map(|m| m.im).sum::<f64>() / (std::f64::consts::PI * self.m.len() as f64)
    }
}

/// Consecutive non-decreasing residuals, or consecutive reversals of the
/// update direction, that switch on damping.
const STALL_LIMIT: usize = 5;
const DAMPING: f64 = 0.5;

/// Solves the QVE at `z` by the fixed-point iteration
/// `m <- -1 / (z + S m)` started from `m_x = -1/z`.
pub fn solve_qve(s: &VarianceMatrix, z: Complex64, opts: &QveOptions) -> Result<SpectralProbe, QveError> {
    let start = vec![-z.inv(); s.n()];
    solve_qve_from(s, z, start, opts)
}

/// Same iteration from a caller-supplied starting point, e.g. the solution at
/// a nearby spectral parameter. Any start in the upper half plane converges
/// to the same solution.
pub fn solve_qve_from(
    s: &VarianceMatrix,
    z: Complex64,
    start: Vec<Complex64>,
    opts: &QveOptions,
) -> Result<SpectralProbe, QveError> {
    if !(z.im > 0.0) || !z.re.is_finite() {
        return Err(QveError::Domain(z));
    }
    if !(opts.tol > 0.0) {
        return Err(QveError::InvalidParameter(format!("tol = {}", opts.tol)));
    }
    assert_eq!(start.len(), s.n());
    let n = s.n();
    let mut m = start;
    let mut sm = vec![Complex64::new(0.0, 0.0); n];
    let mut next = vec![Complex64::new(0.0, 0.0); n];
    let mut prev_step = vec![Complex64::new(0.0, 0.0); n];
    let mut prev_residual = f64::INFINITY;
    let (mut stalls, mut flips) = (0, 0);
    let mut damped = false;
    let mut residual = f64::INFINITY;
    for iteration in 0..=opts.max_iter {
        s.matvec_complex_into(&m, &mut sm);
        residual = 0.0;
        let mut alignment = 0.0;
        for (((nx, &mx), &smx), px) in next.iter_mut().zip(&m).zip(&sm).zip(prev_step.iter_mut()) {
            *nx = -(z + smx).inv();
            let step = *nx - mx;
            residual = f64::max(residual, step.norm());
            alignment += (px.conj() * step).re;
            *px = step;
        }
        if residual <= opts.tol {
            return Ok(SpectralProbe {
                z,
                m,
                iterations: iteration,
                residual,
                damped,
            });
        }
        if !residual.is_finite() {
            break;
        }
        // successive steps pointing against each other mean the undamped
        // map rotates around the fixed point instead of approaching it
        stalls = if residual >= prev_residual { stalls + 1 } else { 0 };
        flips = if alignment < 0.0 { flips + 1 } else { 0 };
        if stalls >= STALL_LIMIT || flips >= STALL_LIMIT {
            damped = true;
        }
        prev_residual = residual;
        if damped {
            for (mx, &nx) in m.iter_mut().zip(&next) {
                *mx = (1.0 - DAMPING) * *mx + DAMPING * nx;
            }
        } else {
            std::mem::swap(&mut m, &mut next);
        }
    }
    Err(QveError::NoConvergence {
        z,
        iterations: opts.max_iter,
        residual,
    })
}

/// The `eta`-smoothed density of states at `tau`.
pub fn density(s: &VarianceMatrix, tau: f64, eta: f64, opts: &QveOptions) -> Result<f64, QveError> {
    if !(eta > 0.0) {
        return Err(QveError::InvalidParameter(format!("eta = {eta}")));
    }
    Ok(solve_qve(s, Complex64::new(tau, eta), opts)?.density())
}

/// Densities at every point of `taus`. Consecutive points are grouped in
/// blocks that run in parallel; inside a block each probe starts from the
/// previous solution, which pays off when `taus` is sorted.
pub fn density_scan(
    s: &VarianceMatrix,
    taus: &[f64],
    eta: f64,
    opts: &QveOptions,
) -> Result<Vec<(f64, f64)>, QveError> {
    if !(eta > 0.0) {
        return Err(QveError::InvalidParameter(format!("eta = {eta}")));
    }
    let blocks = par::map_indexed(taus.len().div_ceil(SCAN_BLOCK), |b| {
        let mut warm: Option<Vec<Complex64>> = None;
        let mut out = Vec::with_capacity(SCAN_BLOCK);
        for &tau in taus.iter().skip(b * SCAN_BLOCK).take(SCAN_BLOCK) {
            let z = Complex64::new(tau, eta);
            let probe = match warm.take() {
                Some(start) => solve_qve_from(s, z, start, opts)?,
                None => solve_qve(s, z, opts)?,
            };
            out.push((tau, probe.density()));
            warm = Some(probe.m);
        }
        Ok(out)
    });
    let mut out = Vec::with_capacity(taus.len());
    for b in blocks {
        out.extend(b?);
    }
    Ok(out)
}

/// Parameters of the edge scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SupportScan {
    pub eta: f64,
    pub grid_step: f64,
    pub threshold: f64,
    #[serde(flatten)]
    pub solver: QveOptions,
}

impl Default for SupportScan {
    fn default() -> Self {
        Self {
            eta: 1e-3,
            grid_step: 1e-3,
            threshold: 1e-2,
            solver: QveOptions {
                tol: 1e-9,
                ..QveOptions::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportEstimate {
    /// Largest grid point whose smoothed density exceeds the threshold, or 0.
    pub support: f64,
    pub found: bool,
    /// Upper end of the nominal grid, `2 ||S||^{1/2} + 1`.
    pub range_max: f64,
    /// Highest grid point actually probed; every grid point above it has a
    /// smoothed density provably below the threshold.
    pub probe_start: f64,
    pub probes: usize,
    pub iterations: usize,
    #[serde(flatten)]
    pub scan: SupportScan,
}

/// Grid points per sequential warm-started run; runs are independent.
const SCAN_BLOCK: usize = 32;

/// Largest `tau` on the grid `{0, step, 2 step, ..} ∩ [0, 2||S||^{1/2} + 1]`
/// with `density(tau, eta) > threshold`. Only `tau >= 0` is scanned since the
/// density is even.
///
/// The scan runs from the top down and stops at the first block containing a
/// hit. Grid points above `B + d` are not probed, where `B = 2||S||^{1/2}`
/// bounds the support and `d` solves `(eta/pi) / (d^2 + eta^2) = threshold`:
/// for a probability measure supported in `[-B, B]` the smoothed density
/// there cannot exceed the threshold.
pub fn estimate_support(s: &VarianceMatrix, scan: &SupportScan) -> Result<SupportEstimate, QveError> {
    if !(scan.eta > 0.0 && scan.grid_step > 0.0 && scan.threshold > 0.0) {
        return Err(QveError::InvalidParameter(format!(
            "eta, grid_step and threshold must be positive ({}, {}, {})",
            scan.eta, scan.grid_step, scan.threshold
        )));
    }
    let trivial = 2.0 * s.inf_norm().sqrt();
    let range_max = trivial + 1.0;
    if s.is_zero() {
        // rho is a point mass at 0, whose smoothed density is the Lorentzian
        // of width eta rather than anything the threshold could resolve
        return Ok(SupportEstimate {
            support: 0.0,
            found: false,
            range_max,
            probe_start: 0.0,
            probes: 0,
            iterations: 0,
            scan: *scan,
        });
    }
    let top = (range_max / scan.grid_step).floor() as usize;
    let reach2 = scan.eta / (std::f64::consts::PI * scan.threshold) - scan.eta * scan.eta;
    let skip_above = trivial + reach2.max(0.0).sqrt();
    let first = top.min((skip_above / scan.grid_step).ceil() as usize);
    let mut estimate = SupportEstimate {
        support: 0.0,
        found: false,
        range_max,
        probe_start: first as f64 * scan.grid_step,
        probes: 0,
        iterations: 0,
        scan: *scan,
    };
    // grid indices first, first-1, ..., 0 cut into fixed blocks
    let n_points = first + 1;
    let n_blocks = n_points.div_ceil(SCAN_BLOCK);
    let batch = batch_width();
    let mut block = 0;
    while block < n_blocks {
        let width = batch.min(n_blocks - block);
        let results = par::map_indexed(width, |b| {
            let hi = first - (block + b) * SCAN_BLOCK;
            let len = SCAN_BLOCK.min(hi + 1);
            scan_block(s, scan, hi, len)
        });
        for r in results {
            let r = r?;
            estimate.probes += r.probes;
            estimate.iterations += r.iterations;
            if let (Some(i), false) = (r.hit, estimate.found) {
                estimate.support = i as f64 * scan.grid_step;
                estimate.found = true;
            }
        }
        if estimate.found {
            return Ok(estimate);
        }
        block += width;
    }
    Ok(estimate)
}

fn batch_width() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads().max(1)
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

struct BlockResult {
    hit: Option<usize>,
    probes: usize,
    iterations: usize,
}

/// Probes grid indices `hi, hi-1, .., hi-len+1`, warm-starting each probe
/// from the previous one, and stops at the first index above threshold.
fn scan_block(s: &VarianceMatrix, scan: &SupportScan, hi: usize, len: usize) -> Result<BlockResult, QveError> {
    let mut out = BlockResult {
        hit: None,
        probes: 0,
        iterations: 0,
    };
    let mut warm: Option<Vec<Complex64>> = None;
    for i in (hi + 1 - len..=hi).rev() {
        let z = Complex64::new(i as f64 * scan.grid_step, scan.eta);
        let probe = match warm.take() {
            Some(start) => solve_qve_from(s, z, start, &scan.solver)?,
            None => solve_qve(s, z, &scan.solver)?,
        };
        out.probes += 1;
        out.iterations += probe.iterations;
        if probe.density() > scan.threshold {
            out.hit = Some(i);
            break;
        }
        warm = Some(probe.m);
    }
    Ok(out)
}

/// The even moments `c[x][k] = mu_{x,2k}` of the per-vertex measures.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentTable {
    pub n: usize,
    pub kmax: usize,
    /// `c[k][x]`.
    c: Vec<Vec<f64>>,
}

impl MomentTable {
    pub fn get(&self, x: usize, k: usize) -> f64 {
        self.c[k][x]
    }

    /// `c_{., k}` as a vector over `x`.
    pub fn order(&self, k: usize) -> &[f64] {
        &self.c[k]
    }
}

/// `c_{x,0} = 1`, `c_{x,k} = sum_y S[x][y] sum_{n<k} c_{x,k-n-1} c_{y,n}`.
///
/// The inner sum is regrouped as `sum_n c_{x,k-n-1} (S c_{.,n})_x`, so each
/// order costs one matrix-vector product plus `O(k N)`.
pub fn moment_recursion(s: &VarianceMatrix, kmax: usize) -> Result<MomentTable, QveError> {
    let n = s.n();
    let mut c: Vec<Vec<f64>> = vec![vec![1.0; n]];
    let mut sc: Vec<Vec<f64>> = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        sc.push(s.matvec(&c[k - 1]));
        let ck: Vec<f64> = (0..n)
            .map(|x| (0..k).map(|m| c[k - m - 1][x] * sc[m][x]).sum())
            .collect();
        if ck.iter().any(|v| !v.is_finite()) {
            return Err(QveError::OverflowGuard { k });
        }
        c.push(ck);
    }
    Ok(MomentTable { n, kmax, c })
}

/// `max_x c_{x,kmax}^{1/(2 kmax)}`, a finite-order proxy for the edge of the
/// support. It approaches the edge from below as `kmax` grows.
pub fn support_from_moments(table: &MomentTable, kmax: usize) -> Result<f64, QveError> {
    if kmax == 0 || kmax > table.kmax {
        return Err(QveError::InvalidParameter(format!(
            "kmax must lie in 1..={}, got {kmax}",
            table.kmax
        )));
    }
    let exponent = 1.0 / (2 * kmax) as f64;
    Ok(table
        .order(kmax)
        .iter()
        .map(|c| c.powf(exponent))
        .fold(0.0, f64::max))
}
