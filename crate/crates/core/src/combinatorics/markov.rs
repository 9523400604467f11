//! Uniform Dyck paths as an inhomogeneous Markov chain, and its
//! time-homogeneous approximation near the bottom boundary.

use num_rational::Ratio;
use serde::Serialize;

use super::dyck::{enumerate_dyck, Step};
use super::CombinatoricsError;

fn check_triangle(t: usize, h: usize, k: usize) -> Result<(), CombinatoricsError> {
    if t >= 2 * k || h > t || h > 2 * k - t {
        return Err(CombinatoricsError::Domain(format!(
            "(t, h) = ({t}, {h}) is not an interior point of the triangle for k = {k}"
        )));
    }
    Ok(())
}

/// Probability that a uniform path in `D_{2k}` steps up at time `t`, given
/// that it sits at height `h`:
/// `p = (1/2) (h+2)/(h+1) (2k-t-h)/(2k-t)`.
pub fn dyck_transition_prob(t: usize, h: usize, k: usize) -> Result<f64, CombinatoricsError> {
    check_triangle(t, h, k)?;
    let (t, h, k) = (t as f64, h as f64, k as f64);
    Ok(0.5 * (h + 2.0) / (h + 1.0) * (2.0 * k - t - h) / (2.0 * k - t))
}

/// The same probability as an exact fraction.
pub fn exact_transition_prob(t: usize, h: usize, k: usize) -> Result<Ratio<u64>, CombinatoricsError> {
    check_triangle(t, h, k)?;
    let (t, h, k) = (t as u64, h as u64, k as u64);
    Ok(Ratio::new((h + 2) * (2 * k - t - h), 2 * (h + 1) * (2 * k - t)))
}

/// How many paths of `D_{2k}` pass through `(t, h)` and how many of those step
/// up next.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TransitionCount {
    pub t: usize,
    pub h: usize,
    pub through: u64,
    pub up: u64,
}

impl TransitionCount {
    pub fn frequency(&self) -> Ratio<u64> {
        Ratio::new(self.up, self.through)
    }
}

/// Conditional up-step counts at every reachable `(t, h)` with `t < 2k`,
/// sorted by `(t, h)`.
pub fn exhaustive_transition_counts(k: usize) -> Result<Vec<TransitionCount>, CombinatoricsError> {
    let paths = enumerate_dyck(k)?;
    let width = 2 * k;
    let mut through = vec![0u64; width * (k + 1)];
    let mut up = vec![0u64; width * (k + 1)];
    for p in &paths {
        let mut h = 0usize;
        for (t, s) in p.steps().iter().enumerate() {
            through[t * (k + 1) + h] += 1;
            match s {
                Step::Up => {
                    up[t * (k + 1) + h] += 1;
                    h += 1;
                }
                Step::Down => h -= 1,
            }
        }
    }
    let mut out = Vec::new();
    for t in 0..width {
        for h in 0..=k {
            let idx = t * (k + 1) + h;
            if through[idx] > 0 {
                out.push(TransitionCount {
                    t,
                    h,
                    through: through[idx],
                    up: up[idx],
                });
            }
        }
    }
    Ok(out)
}

/// Both sides of the closed form for the bottom approximation of the chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PbotValue {
    /// `prod_i p_i^{[up]} (1 - p_i)^{[down]}` with `p_i = (1/2)(h_i+2)/(h_i+1)`.
    pub product: f64,
    /// `(1/2)^n (h + 1 + Δω) / (h + 1)`.
    pub closed_form: f64,
}

impl PbotValue {
    pub fn deviation(&self) -> f64 {
        (self.product - self.closed_form).abs()
    }
}

/// Probability of the increments `omega` started at height `h` under the
/// chain that steps up with probability `(1/2)(h'+2)/(h'+1)` from height `h'`.
///
/// The heights before each step must be nonnegative; the final height may be
/// `-1`, which has probability zero.
pub fn pbot_probability(h: usize, omega: &[Step]) -> Result<PbotValue, CombinatoricsError> {
    let mut height = h as i64;
    let mut product = 1.0;
    for (i, s) in omega.iter().enumerate() {
        if height < 0 {
            return Err(CombinatoricsError::Domain(format!(
                "height {height} before step {} is negative",
                i + 1
            )));
        }
        let hf = height as f64;
        let p = 0.5 * (hf + 2.0) / (hf + 1.0);
        product *= match s {
            Step::Up => p,
            Step::Down => 1.0 - p,
        };
        height += s.delta();
    }
    let n = omega.len() as i32;
    let delta: i64 = omega.iter().map(|s| s.delta()).sum();
    let closed_form = 0.5f64.powi(n) * (h as i64 + 1 + delta) as f64 / (h as f64 + 1.0);
    Ok(PbotValue {
        product,
        closed_form,
    })
}

/// Both sides of the bottom-chain closed form as exact fractions.
pub fn pbot_exact(h: usize, omega: &[Step]) -> Result<(Ratio<i128>, Ratio<i128>), CombinatoricsError> {
    let mut height = h as i128;
    let mut product = Ratio::from_integer(1i128);
    for (i, s) in omega.iter().enumerate() {
        if height < 0 {
            return Err(CombinatoricsError::Domain(format!(
                "height {height} before step {} is negative",
                i + 1
            )));
        }
        let p = Ratio::new(height + 2, 2 * (height + 1));
        product *= match s {
            Step::Up => p,
            Step::Down => Ratio::from_integer(1) - p,
        };
        height += s.delta() as i128;
    }
    let closed = Ratio::new(h as i128 + 1 + (height - h as i128), (h as i128 + 1) << omega.len());
    Ok((product, closed))
}

/// Outcome of [`pbot_exhaustive`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PbotSummary {
    pub cases: usize,
    /// Cases where the two sides differ as exact fractions.
    pub exact_mismatches: usize,
    /// Largest `|product - closed form|` in floating point.
    pub max_deviation: f64,
}

/// Checks the closed form for every `h <= max_h` and every admissible
/// `omega` of length `<= max_n`.
pub fn pbot_exhaustive(max_n: usize, max_h: usize) -> PbotSummary {
    let mut out = PbotSummary {
        cases: 0,
        exact_mismatches: 0,
        max_deviation: 0.0,
    };
    for n in 0..=max_n {
        for h in 0..=max_h {
            for code in 0u32..(1u32 << n) {
                let omega: Vec<Step> = (0..n)
                    .map(|i| if code >> i & 1 == 1 { Step::Up } else { Step::Down })
                    .collect();
                if let Ok(v) = pbot_probability(h, &omega) {
                    let (product, closed) = pbot_exact(h, &omega).expect("same admissibility");
                    out.cases += 1;
                    out.exact_mismatches += usize::from(product != closed);
                    out.max_deviation = out.max_deviation.max(v.deviation());
                }
            }
        }
    }
    out
}
