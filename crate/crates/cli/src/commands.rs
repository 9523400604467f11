use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use specbound::bound::{support_bound, BoundReport};
use specbound::combinatorics::run_oracle_suite;
use specbound::mc::{mc_experiment, Ensemble, McConfig, McResult};
use specbound::qve::{
    density_scan, estimate_support, moment_recursion, support_from_moments, QveOptions, SupportEstimate,
    SupportScan,
};

use crate::source::{load, Loaded, SourceArgs, SourceInfo, SourceOptions};
use crate::{Failure, Output};

const DEFAULT_N: usize = 500;
const ORACLE_DEFAULT_N: usize = 6;

#[derive(Args, Clone, Debug, Serialize)]
pub struct BoundKnobs {
    /// Number of norm ratios z_1..z_J used exactly
    #[arg(short = 'J', long = "j", default_value_t = 50)]
    pub j: usize,
    /// Width of the final bisection bracket for w_c
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct QveKnobs {
    /// Imaginary part of the spectral parameter
    #[arg(long, default_value_t = 1e-3)]
    pub eta: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub grid_step: f64,
    /// Smoothed density above which a grid point counts as inside the support
    #[arg(long, default_value_t = 1e-2)]
    pub threshold: f64,
    /// Fixed-point residual at which a probe counts as converged
    #[arg(long, default_value_t = 1e-9)]
    pub qve_tol: f64,
    #[arg(long, default_value_t = 200_000)]
    pub max_iter: usize,
}

impl QveKnobs {
    fn scan(&self) -> SupportScan {
        SupportScan {
            eta: self.eta,
            grid_step: self.grid_step,
            threshold: self.threshold,
            solver: QveOptions {
                tol: self.qve_tol,
                max_iter: self.max_iter,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum EnsembleArg {
    RealSymmetric,
    ComplexHermitian,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct McKnobs {
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = EnsembleArg::RealSymmetric)]
    pub ensemble: EnsembleArg,
    /// Relative change of successive Rayleigh quotients that stops the power iteration
    #[arg(long, default_value_t = 1e-12)]
    pub power_tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub power_max_iter: usize,
}

impl McKnobs {
    fn config(&self) -> McConfig {
        McConfig {
            trials: self.trials,
            seed: self.seed,
            ensemble: match self.ensemble {
                EnsembleArg::RealSymmetric => Ensemble::RealSymmetric,
                EnsembleArg::ComplexHermitian => Ensemble::ComplexHermitian,
            },
            power_tol: self.power_tol,
            power_max_iter: self.power_max_iter,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct BoundArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub opts: SourceOptions,
    #[command(flatten)]
    pub bound: BoundKnobs,
}

#[derive(Args, Debug, Serialize)]
pub struct QveArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub opts: SourceOptions,
    #[command(flatten)]
    pub qve: QveKnobs,
    /// Also write the smoothed density on [0, 2||S||^{1/2} + 1] as CSV
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Spacing of the CSV grid
    #[arg(long, default_value_t = 1e-2)]
    pub csv_step: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct McArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub opts: SourceOptions,
    #[command(flatten)]
    pub mc: McKnobs,
}

#[derive(Args, Debug, Serialize)]
pub struct OracleArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub opts: SourceOptions,
    /// Largest tree size; every order up to it is checked
    #[arg(long, default_value_t = 5)]
    pub k: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct ReportArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub opts: SourceOptions,
    #[command(flatten)]
    pub bound: BoundKnobs,
    #[command(flatten)]
    pub qve: QveKnobs,
    #[command(flatten)]
    pub mc: McKnobs,
    /// Moment order for the finite-order edge proxy, which approaches the
    /// edge from below roughly like k^{-3/(4k)}
    #[arg(long, default_value_t = 100)]
    pub kmax: usize,
}

/// Embedded in every report so the numbers can be regenerated.
#[derive(Serialize)]
struct RunManifest<'a, P: Serialize> {
    command: &'static str,
    params: &'a P,
    source: &'a SourceInfo,
    version: &'static str,
    threads: usize,
    started_unix: f64,
    wall_clock_secs: f64,
}

struct Clock {
    started_unix: f64,
    start: Instant,
}

impl Clock {
    fn start() -> Self {
        Self {
            started_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs_f64())
                .unwrap_or(0.0),
            start: Instant::now(),
        }
    }

    fn manifest<'a, P: Serialize>(
        &self,
        command: &'static str,
        params: &'a P,
        source: &'a SourceInfo,
        threads: usize,
    ) -> RunManifest<'a, P> {
        RunManifest {
            command,
            params,
            source,
            version: env!("CARGO_PKG_VERSION"),
            threads,
            started_unix: self.started_unix,
            wall_clock_secs: self.start.elapsed().as_secs_f64(),
        }
    }
}

/// For a linearized rectangular profile the spectrum is `+-` the singular
/// values, so the Gram matrix bounds are the squares.
fn gram_note(info: &SourceInfo, b: &BoundReport) -> Option<Value> {
    info.gram.map(|(rows, cols)| {
        json!({
            "rows": rows,
            "cols": cols,
            "note": "the linearized matrix has eigenvalues +-sqrt of the Gram eigenvalues; square the bounds to bound the Gram matrix",
            "gram_trivial_bound": b.trivial_bound * b.trivial_bound,
            "gram_improved_bound": b.improved_bound * b.improved_bound,
        })
    })
}

fn bound_summary(b: &BoundReport) -> String {
    format!(
        "N={} J={} ||S||={:.6}\n  trivial bound   {:.6}\n  w_c             {:.10}\n  improved bound  {:.6}\n",
        b.n, b.j, b.norm_s, b.trivial_bound, b.w_c, b.improved_bound
    )
}

fn with_gram(mut report: Value, info: &SourceInfo, b: &BoundReport) -> Value {
    if let Some(g) = gram_note(info, b) {
        report["gram"] = g;
    }
    report
}

fn gram_summary(info: &SourceInfo, b: &BoundReport) -> String {
    match info.gram {
        Some((rows, cols)) => format!(
            "  linearization of a {rows}x{cols} profile: Gram bounds are the squares ({:.6}, {:.6})\n",
            b.trivial_bound.powi(2),
            b.improved_bound.powi(2)
        ),
        None => String::new(),
    }
}

pub fn bound(args: &BoundArgs, threads: usize, out: &Output) -> Result<(), Failure> {
    let clock = Clock::start();
    let Loaded { s, info } = load(&args.source, &args.opts, DEFAULT_N)?;
    let b = support_bound(&s, args.bound.j, args.bound.tol).map_err(Failure::library)?;
    out.summary(&(bound_summary(&b) + &gram_summary(&info, &b)));
    let report = json!({
        "manifest": clock.manifest("bound", args, &info, threads),
        "bound": b,
    });
    out.json(&with_gram(report, &info, &b))
}

fn support_summary(e: &SupportEstimate) -> String {
    if e.found {
        format!(
            "QVE edge estimate {:.4} (eta {}, step {}, threshold {}; {} probes, {} iterations)\n",
            e.support, e.scan.eta, e.scan.grid_step, e.scan.threshold, e.probes, e.iterations
        )
    } else {
        format!(
            "QVE edge not found: smoothed density never exceeds {} on [0, {:.4}]; reporting 0\n",
            e.scan.threshold, e.range_max
        )
    }
}

pub fn qve(args: &QveArgs, threads: usize, out: &Output) -> Result<(), Failure> {
    let clock = Clock::start();
    let Loaded { s, info } = load(&args.source, &args.opts, DEFAULT_N)?;
    let scan = args.qve.scan();
    let e = estimate_support(&s, &scan).map_err(Failure::library)?;
    let mut summary = support_summary(&e);
    if let Some(path) = &args.csv {
        if !(args.csv_step > 0.0) {
            return Err(Failure::input(format!("--csv-step must be positive, got {}", args.csv_step)));
        }
        let points = (e.range_max / args.csv_step).floor() as usize;
        let taus: Vec<f64> = (0..=points).map(|i| i as f64 * args.csv_step).collect();
        let rows = density_scan(&s, &taus, scan.eta, &scan.solver).map_err(Failure::library)?;
        let mut text = String::from("tau,density\n");
        for (tau, d) in rows {
            let _ = writeln!(text, "{tau},{d}");
        }
        std::fs::write(path, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
        let _ = writeln!(summary, "density on {} grid points written to {}", points + 1, path.display());
    }
    out.summary(&summary);
    out.json(&json!({
        "manifest": clock.manifest("qve", args, &info, threads),
        "support": e,
        "csv": args.csv,
    }))
}

fn mc_summary(r: &McResult) -> String {
    let std = if r.std_defined {
        format!("{:.4}", r.std)
    } else {
        "undefined (reported as 0)".into()
    };
    format!(
        "{} trials ({} failed): mean |lambda|_max {:.4}, std {std}, {:.1} s\n",
        r.trials, r.failures, r.mean, r.elapsed
    )
}

pub fn mc(args: &McArgs, threads: usize, out: &Output) -> Result<(), Failure> {
    let clock = Clock::start();
    let cfg = args.mc.config();
    cfg.validate().map_err(Failure::library)?;
    let Loaded { s, info } = load(&args.source, &args.opts, DEFAULT_N)?;
    let r = mc_experiment(&s, &cfg).map_err(Failure::library)?;
    out.summary(&mc_summary(&r));
    out.json(&json!({
        "manifest": clock.manifest("mc", args, &info, threads),
        "mc": r,
    }))
}

pub fn oracle(args: &OracleArgs, threads: usize, out: &Output) -> Result<(), Failure> {
    let clock = Clock::start();
    let Loaded { s, info } = load(&args.source, &args.opts, ORACLE_DEFAULT_N)?;
    let r = run_oracle_suite(&s, args.k).map_err(Failure::library)?;
    let mut summary = format!(
        "orders 0..={}: {} trees, {} checks, {} violations (max relative excess {:.2e})\n  tree sums:",
        r.k,
        r.n_trees,
        r.checks,
        r.violations.len(),
        r.max_slack
    );
    for v in &r.tree_sums {
        let _ = write!(summary, " {v:.6}");
    }
    summary.push('\n');
    for v in r.violations.iter().take(10) {
        let _ = writeln!(summary, "  violation: {} on {} ({} vs {})", v.check, v.subject, v.lhs, v.rhs);
    }
    out.summary(&summary);
    out.json(&json!({
        "manifest": clock.manifest("oracle", args, &info, threads),
        "oracle": r,
    }))
}

#[derive(Serialize)]
struct Comparison {
    trivial_bound: f64,
    improved_bound: f64,
    qve_support: f64,
    qve_found: bool,
    moment_proxy: f64,
    moment_kmax: usize,
    mc_mean: f64,
    mc_std: f64,
    /// `mc_mean - 3 mc_std <= qve_support + grid_step <= improved + grid_step
    /// <= trivial + grid_step`.
    ordering_holds: bool,
}

pub fn report(args: &ReportArgs, threads: usize, out: &Output) -> Result<(), Failure> {
    let clock = Clock::start();
    let cfg = args.mc.config();
    cfg.validate().map_err(Failure::library)?;
    if args.kmax == 0 {
        return Err(Failure::input("--kmax must be at least 1"));
    }
    let Loaded { s, info } = load(&args.source, &args.opts, DEFAULT_N)?;
    let b = support_bound(&s, args.bound.j, args.bound.tol).map_err(Failure::library)?;
    let scan = args.qve.scan();
    let e = estimate_support(&s, &scan).map_err(Failure::library)?;
    // c_k(cS) = c^k c_k(S): run the recursion on S/||S|| so it cannot overflow
    let unit = s.scaled(1.0 / b.norm_s).map_err(Failure::library)?;
    let table = moment_recursion(&unit, args.kmax).map_err(Failure::library)?;
    let proxy = support_from_moments(&table, args.kmax).map_err(Failure::library)? * b.norm_s.sqrt();
    let r = mc_experiment(&s, &cfg).map_err(Failure::library)?;

    let step = scan.grid_step;
    let cmp = Comparison {
        trivial_bound: b.trivial_bound,
        improved_bound: b.improved_bound,
        qve_support: e.support,
        qve_found: e.found,
        moment_proxy: proxy,
        moment_kmax: args.kmax,
        mc_mean: r.mean,
        mc_std: r.std,
        ordering_holds: r.mean - 3.0 * r.std <= e.support + step
            && e.support <= b.improved_bound + step
            && b.improved_bound <= b.trivial_bound,
    };
    let mut summary = String::new();
    let _ = writeln!(summary, "{:<22}{:>12}", "estimate", "value");
    for (name, v) in [
        ("MC mean |lambda|_max", format!("{:.4} +- {:.4}", cmp.mc_mean, cmp.mc_std)),
        (&format!("moment proxy k={}", args.kmax), format!("{:.4}", cmp.moment_proxy)),
        ("QVE edge estimate", format!("{:.4}", cmp.qve_support)),
        ("improved bound", format!("{:.4}", cmp.improved_bound)),
        ("trivial bound", format!("{:.4}", cmp.trivial_bound)),
    ] {
        let _ = writeln!(summary, "{name:<22}{v:>12}");
    }
    let _ = writeln!(
        summary,
        "ordering MC - 3 std <= QVE <= improved <= trivial: {}",
        if cmp.ordering_holds { "holds" } else { "VIOLATED" }
    );
    summary += &gram_summary(&info, &b);
    out.summary(&summary);
    let report = json!({
        "manifest": clock.manifest("report", args, &info, threads),
        "comparison": cmp,
        "bound": b,
        "support": e,
        "moments": { "kmax": args.kmax, "proxy": proxy },
        "mc": r,
    });
    out.json(&with_gram(report, &info, &b))
}
