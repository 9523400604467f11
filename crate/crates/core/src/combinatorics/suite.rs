use serde::Serialize;

use crate::bound::critical_w;
use crate::linalg::VarianceMatrix;
use crate::par;
use crate::qve::moment_recursion;

use super::dyck::{enumerate_dyck, DyckPath};
use super::genfn::{generating_function_pole, stopped_walk_brute_force, stopped_walk_generating_function};
use super::markov::{exact_transition_prob, exhaustive_transition_counts, pbot_exhaustive};
use super::runs::run_statistics;
use super::tree::{forest_val, path_to_tree, tree_val_all, SplitMode};
use super::CombinatoricsError;

/// Relative slack allowed for inequalities between floating-point values.
const INEQ_TOL: f64 = 1e-12;
/// Relative tolerance for identities between two summation orders.
const IDENTITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub check: String,
    pub subject: String,
    pub lhs: f64,
    pub rhs: f64,
}

/// `lhs / rhs - 1`, positive when `lhs > rhs`.
fn excess(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs - 1.0
    } else if lhs > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

#[derive(Default)]
struct Tally {
    checks: usize,
    violations: Vec<Violation>,
    max_slack: f64,
}

impl Tally {
    fn new() -> Self {
        Self {
            max_slack: f64::NEG_INFINITY,
            ..Self::default()
        }
    }

    /// Records `lhs <= rhs` up to [`INEQ_TOL`].
    fn leq(&mut self, check: &str, subject: impl FnOnce() -> String, lhs: f64, rhs: f64) {
        self.checks += 1;
        let e = excess(lhs, rhs);
        self.max_slack = self.max_slack.max(e);
        if e > INEQ_TOL || lhs.is_nan() || rhs.is_nan() {
            self.violations.push(Violation {
                check: check.into(),
                subject: subject(),
                lhs,
                rhs,
            });
        }
    }

    /// Records `lhs == rhs` up to relative tolerance `tol`.
    fn close(&mut self, check: &str, subject: impl FnOnce() -> String, lhs: f64, rhs: f64, tol: f64) {
        self.checks += 1;
        let scale = lhs.abs().max(rhs.abs());
        if !((lhs - rhs).abs() <= tol * scale) {
            self.violations.push(Violation {
                check: check.into(),
                subject: subject(),
                lhs,
                rhs,
            });
        }
    }

    fn absorb(&mut self, other: Tally) {
        self.checks += other.checks;
        self.violations.extend(other.violations);
        self.max_slack = self.max_slack.max(other.max_slack);
    }
}

/// Outcome of checking the chopping bounds on every tree with `k` edges.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChoppingReport {
    pub k: usize,
    pub n_trees: usize,
    pub checks: usize,
    pub violations: Vec<Violation>,
    /// Largest relative excess `lhs/rhs - 1` over all inequality checks;
    /// nonpositive when every inequality holds strictly.
    pub max_slack: f64,
}

/// For every tree `T` with `k` edges and Dyck path `pi`:
///
/// * `val(T) <= ||S||^k z^{U(pi)}` and `val(T) <= ||S||^k z^{D(pi)}`;
/// * chopping `T` almost completely keeping leftmost (rightmost) children
///   yields chains whose lengths are the up-run (down-run) lengths of `pi`,
///   and whose value is exactly `||S||^k z^U` (`||S||^k z^D`);
/// * `val` never decreases under a single split of any vertex in any mode.
pub fn chopping_bound_check(s: &VarianceMatrix, k: usize) -> Result<ChoppingReport, CombinatoricsError> {
    let paths = enumerate_dyck(k)?;
    let tally = chopping_tally(s, k, &paths)?;
    Ok(ChoppingReport {
        k,
        n_trees: paths.len(),
        checks: tally.checks,
        violations: tally.violations,
        max_slack: tally.max_slack,
    })
}

fn chopping_tally(s: &VarianceMatrix, k: usize, paths: &[DyckPath]) -> Result<Tally, CombinatoricsError> {
    let mut tally = Tally::new();
    if k == 0 || s.is_zero() {
        return Ok(tally);
    }
    let z = s.norm_sequence(k).expect("nonzero profile");
    let norm_k = z.norm_s.powi(k as i32);
    let per_tree = par::map_indexed(paths.len(), |i| -> Result<Tally, CombinatoricsError> {
        let p = &paths[i];
        let name = || p.to_brackets();
        let mut t = Tally::new();
        let tree = path_to_tree(p);
        let val = forest_val(s, &tree)?;
        let runs = run_statistics(p.steps(), k);
        let up_bound = norm_k * runs.up_weight(&z);
        let down_bound = norm_k * runs.down_weight(&z);
        t.leq("val <= ||S||^k z^U", name, val, up_bound);
        t.leq("val <= ||S||^k z^D", name, val, down_bound);

        for (mode, counts, bound, label) in [
            (SplitMode::Leftmost, &runs.up, up_bound, "leftmost chop"),
            (SplitMode::Rightmost, &runs.down, down_bound, "rightmost chop"),
        ] {
            let chopped = tree.chop_linear(mode);
            let mut lens = chopped.chain_lengths().expect("chopped forest is linear");
            lens.sort_unstable();
            let mut expected: Vec<usize> = counts
                .iter()
                .enumerate()
                .flat_map(|(j, &c)| std::iter::repeat_n(j + 1, c))
                .collect();
            expected.sort_unstable();
            t.checks += 1;
            if lens != expected {
                t.violations.push(Violation {
                    check: format!("{label} chains match runs"),
                    subject: format!("{} chains {lens:?} runs {expected:?}", p.to_brackets()),
                    lhs: lens.len() as f64,
                    rhs: expected.len() as f64,
                });
            }
            let chopped_val = forest_val(s, &chopped)?;
            t.close(&format!("{label} value"), name, chopped_val, bound, IDENTITY_TOL);
            t.leq(&format!("val <= val({label})"), name, val, chopped_val);
        }

        for v in tree.vertices() {
            for mode in SplitMode::ALL {
                if let Ok(split) = tree.split_vertex(v, mode) {
                    let after = forest_val(s, &split)?;
                    t.leq(
                        "val monotone under splitting",
                        || format!("{} vertex {v} {mode:?}", p.to_brackets()),
                        val,
                        after,
                    );
                }
            }
        }
        Ok(t)
    });
    for t in per_tree {
        tally.absorb(t?);
    }
    Ok(tally)
}

/// Everything the oracle suite checked for orders `0..=k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub k: usize,
    pub n: usize,
    /// Trees enumerated over all orders `0..=k`.
    pub n_trees: usize,
    pub checks: usize,
    pub violations: Vec<Violation>,
    /// Largest relative excess over all inequality checks.
    pub max_slack: f64,
    /// `max_x sum_{T in T_j} val_x(T)` for `j = 0..=k`.
    pub tree_sums: Vec<f64>,
    /// `max_x c_{x,j}` from the moment recursion for `j = 0..=k`.
    pub moments: Vec<f64>,
    pub transition_points: usize,
    pub pbot_cases: usize,
    pub pbot_max_deviation: f64,
    pub genfn_w: Vec<f64>,
    pub genfn_max_gap: f64,
    pub pole: f64,
    pub critical_w: f64,
}

const PBOT_MAX_N: usize = 10;
const PBOT_MAX_H: usize = 10;
const GENFN_N_MAX: usize = 14;
const POLE_TOL: f64 = 1e-9;

/// Runs every brute-force check against `s` for all orders up to `k`:
/// the tree expansion of the moments, the chopping bounds and monotonicity,
/// the exact Dyck transition probabilities, the bottom-chain closed form and
/// the stopped-walk generating function with its pole.
pub fn run_oracle_suite(s: &VarianceMatrix, k: usize) -> Result<OracleReport, CombinatoricsError> {
    let mut tally = Tally::new();
    let moments = moment_recursion(s, k).map_err(|e| CombinatoricsError::Domain(e.to_string()))?;
    let mut tree_sums = Vec::with_capacity(k + 1);
    let mut n_trees = 0;
    for order in 0..=k {
        let paths = enumerate_dyck(order)?;
        n_trees += paths.len();
        let values = par::map_indexed(paths.len(), |i| tree_val_all(s, &path_to_tree(&paths[i])));
        let mut sums = vec![0.0; s.n()];
        for v in values {
            sums.iter_mut().zip(v?).for_each(|(a, b)| *a += b);
        }
        for (x, &sum) in sums.iter().enumerate() {
            tally.close(
                "sum_T val_x(T) == c_(x,k)",
                || format!("k={order} x={x}"),
                sum,
                moments.get(x, order),
                IDENTITY_TOL,
            );
        }
        tree_sums.push(sums.iter().copied().fold(0.0, f64::max));
        tally.absorb(chopping_tally(s, order, &paths)?);
    }

    let mut transition_points = 0;
    for order in 1..=k {
        for c in exhaustive_transition_counts(order)? {
            transition_points += 1;
            tally.checks += 1;
            let formula = exact_transition_prob(c.t, c.h, order)?;
            if formula != c.frequency() {
                tally.violations.push(Violation {
                    check: "transition probability".into(),
                    subject: format!("k={order} t={} h={}", c.t, c.h),
                    lhs: *formula.numer() as f64 / *formula.denom() as f64,
                    rhs: c.up as f64 / c.through as f64,
                });
            }
        }
    }

    let pbot = pbot_exhaustive(PBOT_MAX_N, PBOT_MAX_H);
    tally.checks += pbot.cases;
    if pbot.exact_mismatches > 0 {
        tally.violations.push(Violation {
            check: "bottom chain closed form".into(),
            subject: format!("n<={PBOT_MAX_N} h<={PBOT_MAX_H}"),
            lhs: pbot.exact_mismatches as f64,
            rhs: 0.0,
        });
    }

    let mut report_w = Vec::new();
    let mut genfn_max_gap: f64 = 0.0;
    let (mut pole, mut wc) = (f64::NAN, f64::NAN);
    if !s.is_zero() {
        let z = s.norm_sequence(k.max(1)).expect("nonzero profile");
        for w in [0.25, 0.5, 0.75] {
            let closed = stopped_walk_generating_function(&z, w)?;
            let (brute, tail) = stopped_walk_brute_force(&z, w, GENFN_N_MAX)?;
            let gap = closed - brute;
            genfn_max_gap = genfn_max_gap.max(gap.abs());
            report_w.push(w);
            tally.checks += 1;
            if !(gap >= -1e-12 && gap <= tail + 1e-12) {
                tally.violations.push(Violation {
                    check: "generating function vs enumeration".into(),
                    subject: format!("w={w}"),
                    lhs: closed,
                    rhs: brute,
                });
            }
        }
        pole = generating_function_pole(&z);
        wc = critical_w(&z, 1e-13)
            .map_err(|e| CombinatoricsError::Domain(e.to_string()))?
            .w_c();
        tally.checks += 1;
        if !((pole - wc).abs() <= POLE_TOL) {
            tally.violations.push(Violation {
                check: "pole == critical_w".into(),
                subject: format!("J={}", z.len()),
                lhs: pole,
                rhs: wc,
            });
        }
    }

    Ok(OracleReport {
        k,
        n: s.n(),
        n_trees,
        checks: tally.checks,
        violations: tally.violations,
        max_slack: tally.max_slack,
        tree_sums,
        moments: (0..=k)
            .map(|j| moments.order(j).iter().copied().fold(0.0, f64::max))
            .collect(),
        transition_points,
        pbot_cases: pbot.cases,
        pbot_max_deviation: pbot.max_deviation,
        genfn_w: report_w,
        genfn_max_gap,
        pole,
        critical_w: wc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::catalan;

    #[test]
    fn wigner_suite_is_clean_and_counts_catalan() {
        let s = VarianceMatrix::wigner(3).unwrap();
        let r = run_oracle_suite(&s, 4).unwrap();
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert_eq!(r.n_trees, 1 + 1 + 2 + 5 + 14);
        for (k, &v) in r.tree_sums.iter().enumerate() {
            assert!((v - catalan(k) as f64).abs() < 1e-12 * catalan(k) as f64);
        }
        assert!((r.pole - 1.0).abs() < 1e-12);
    }

    #[test]
    fn star_tree_reduces_to_plain_norm() {
        let s = VarianceMatrix::exp_profile(4).unwrap();
        let p = DyckPath::from_brackets("()()()()()").unwrap();
        let z = s.norm_sequence(5).unwrap();
        let runs = run_statistics(p.steps(), 5);
        assert_eq!(runs.up_weight(&z), 1.0);
        assert_eq!(runs.down_weight(&z), 1.0);
    }

    #[test]
    fn guard_on_large_k() {
        let s = VarianceMatrix::wigner(2).unwrap();
        assert!(matches!(
            run_oracle_suite(&s, 11),
            Err(CombinatoricsError::SizeGuard { .. })
        ));
    }
}
