//! Expected run weights of the simple random walk.
//!
//! For a simple random walk `pi^(n)` of `n` steps, `E z^{U(pi^(n))}` weights
//! each maximal up-run of length `j` by `z_j` (by 1 when `j > J`). Stopping
//! the walk at an independent geometric time gives the generating function
//!
//! ```text
//! (1 - w) sum_n w^n E z^{U(pi^(n))} = (1 - w) A(q) / (1 - q A(q)),
//! A(q) = 1 + sum_{j<=J} q^j z_j + sum_{j>J} q^j,   q = w/2,
//! ```
//!
//! whose denominator is `phi_J(w)`.

use std::collections::BTreeMap;

use crate::linalg::NormSequence;
use crate::par;

use super::dyck::Step;
use super::runs::run_statistics;
use super::CombinatoricsError;

/// Longest walk [`walk_expectation`] will enumerate.
pub const MAX_WALK_LEN: usize = 24;

fn series_a(z: &NormSequence, q: f64) -> f64 {
    let mut power = 1.0;
    let mut sum = 1.0;
    for &zj in z.ratios() {
        power *= q;
        sum += power * zj;
    }
    sum + power * q / (1.0 - q)
}

/// Closed form of the stopped-walk expectation, valid for `0 <= w < w_c`.
pub fn stopped_walk_generating_function(z: &NormSequence, w: f64) -> Result<f64, CombinatoricsError> {
    if !(0.0..2.0).contains(&w) {
        return Err(CombinatoricsError::Domain(format!("w = {w} outside [0, 2)")));
    }
    let q = 0.5 * w;
    let a = series_a(z, q);
    let denominator = 1.0 - q * a;
    if denominator <= 0.0 {
        return Err(CombinatoricsError::Domain(format!(
            "w = {w} is at or beyond the pole of the generating function"
        )));
    }
    Ok((1.0 - w) * a / denominator)
}

fn walk(code: u64, n: usize) -> Vec<Step> {
    (0..n)
        .map(|i| if code >> i & 1 == 1 { Step::Up } else { Step::Down })
        .collect()
}

/// `E z^{U(pi^(n))}` over all `2^n` equally likely walks.
pub fn walk_expectation(z: &NormSequence, n: usize) -> Result<f64, CombinatoricsError> {
    if n > MAX_WALK_LEN {
        return Err(CombinatoricsError::SizeGuard {
            what: "walk length",
            value: n,
            limit: MAX_WALK_LEN,
        });
    }
    let big_j = z.len();
    let total: f64 = (0..1u64 << n)
        .map(|code| run_statistics(&walk(code, n), big_j).up_weight(z))
        .sum();
    Ok(total / (1u64 << n) as f64)
}

/// `(1 - w) sum_{n <= n_max} w^n E z^{U(pi^(n))}` by exhaustive enumeration,
/// together with the truncation bound `w^{n_max+1} / (1 - w)`. Needs
/// `0 <= w < 1`.
pub fn stopped_walk_brute_force(
    z: &NormSequence,
    w: f64,
    n_max: usize,
) -> Result<(f64, f64), CombinatoricsError> {
    if !(0.0..1.0).contains(&w) {
        return Err(CombinatoricsError::Domain(format!(
            "the truncated series needs 0 <= w < 1, got {w}"
        )));
    }
    let terms = par::map_indexed(n_max + 1, |n| walk_expectation(z, n));
    let mut sum = 0.0;
    for (n, e) in terms.into_iter().enumerate() {
        sum += w.powi(n as i32) * e?;
    }
    Ok(((1.0 - w) * sum, w.powi(n_max as i32 + 1) / (1.0 - w)))
}

/// Smallest positive pole of the generating function, located
/// independently of the bisection in [`crate::bound::critical_w`]: the
/// denominator times `(1 - q)` is expanded into a polynomial in `q` and its
/// unique root in `(0, 1)` is found by safeguarded Newton iteration.
pub fn generating_function_pole(z: &NormSequence) -> f64 {
    let big_j = z.len();
    // b(q) = -1 + q + sum_j z_j q^{j+1} = q A(q) - 1 without the tail
    let mut b = vec![0.0; big_j + 2];
    b[0] = -1.0;
    b[1] = 1.0;
    for j in 1..=big_j {
        b[j + 1] = z.z(j);
    }
    // p(q) = (1 - q) b(q) + q^{J+2} = (1 - q)(q A(q) - 1)
    let mut p = vec![0.0; big_j + 3];
    for (i, &bi) in b.iter().enumerate() {
        p[i] += bi;
        p[i + 1] -= bi;
    }
    p[big_j + 2] += 1.0;
    let eval = |q: f64| {
        p.iter().rev().fold((0.0, 0.0), |(v, d), &c| (v * q + c, d * q + v))
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut q = 0.5;
    for _ in 0..200 {
        let (v, d) = eval(q);
        if v == 0.0 {
            return 2.0 * q;
        }
        if v < 0.0 {
            lo = q;
        } else {
            hi = q;
        }
        let newton = q - v / d;
        let next = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - q).abs() <= 1e-16 * q.max(1.0) || hi - lo <= f64::EPSILON {
            q = next;
            break;
        }
        q = next;
    }
    2.0 * q
}

/// Histograms of the up-run and down-run statistics over all `2^n` walks,
/// keyed by `(counts for j <= J, sorted overflow lengths)`.
pub type RunHistogram = BTreeMap<(Vec<usize>, Vec<usize>), u64>;

pub fn up_down_histograms(n: usize, big_j: usize) -> Result<(RunHistogram, RunHistogram), CombinatoricsError> {
    if n > MAX_WALK_LEN {
        return Err(CombinatoricsError::SizeGuard {
            what: "walk length",
            value: n,
            limit: MAX_WALK_LEN,
        });
    }
    let mut ups = RunHistogram::new();
    let mut downs = RunHistogram::new();
    for code in 0..1u64 << n {
        let mut r = run_statistics(&walk(code, n), big_j);
        r.up_overflow.sort_unstable();
        r.down_overflow.sort_unstable();
        *ups.entry((r.up, r.up_overflow)).or_default() += 1;
        *downs.entry((r.down, r.down_overflow)).or_default() += 1;
    }
    Ok((ups, downs))
}
