//! Command-line frontend: support bounds, QVE edge scans, Monte-Carlo
//! sampling and the combinatorial oracle suite for a variance profile.
//!
//! JSON goes to stdout (or `--output`), a short human summary to stderr.
//! Exit codes: 0 success, 2 bad input, 3 numerical failure.

// `!(x > 0.0)` style guards reject NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod source;

use commands::{BoundArgs, McArgs, OracleArgs, QveArgs, ReportArgs};

#[derive(Parser, Debug)]
#[command(name = "specbound", version, about = "Support bounds for Wigner-type random matrices")]
struct Cli {
    /// Write the JSON report to this file instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Skip the human-readable summary on stderr
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Trivial and improved upper bounds on the support
    Bound(BoundArgs),
    /// Edge of the self-consistent density of states
    Qve(QveArgs),
    /// Spectral radius of sampled matrices
    Mc(McArgs),
    /// Exhaustive checks over Dyck paths and plane trees
    Oracle(OracleArgs),
    /// All estimates side by side
    Report(ReportArgs),
}

/// A failed run, classified for the exit code.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Numeric(String),
}

impl Failure {
    pub fn input(msg: impl Into<String>) -> Self {
        Failure::Input(msg.into())
    }

    pub fn library(e: impl Into<specbound::Error>) -> Self {
        let e = e.into();
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Numeric(m) => m,
        }
    }
}

pub struct Output {
    pub path: Option<PathBuf>,
    pub quiet: bool,
}

impl Output {
    pub fn summary(&self, text: &str) {
        if !self.quiet {
            eprint!("{text}");
        }
    }

    pub fn json(&self, value: &impl serde::Serialize) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(value).expect("reports serialize");
        match &self.path {
            Some(path) => std::fs::write(path, text + "\n")
                .map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display()))),
            None => {
                println!("{text}");
                Ok(())
            }
        }
    }
}

fn configure_threads() -> Result<usize, Failure> {
    let requested = match std::env::var("SPECBOUND_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Some(n),
            _ => return Err(Failure::input(format!("SPECBOUND_THREADS must be a positive integer, got `{v}`"))),
        },
        Err(_) => None,
    };
    #[cfg(feature = "parallel")]
    {
        if let Some(n) = requested {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Failure::input(format!("cannot size the thread pool: {e}")))?;
        }
        Ok(rayon::current_num_threads())
    }
    #[cfg(not(feature = "parallel"))]
    {
        if requested.is_some() {
            log::warn!("SPECBOUND_THREADS is ignored in a build without the parallel feature");
        }
        Ok(1)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let threads = configure_threads()?;
    let out = Output {
        path: cli.output,
        quiet: cli.quiet,
    };
    match cli.command {
        Command::Bound(a) => commands::bound(&a, threads, &out),
        Command::Qve(a) => commands::qve(&a, threads, &out),
        Command::Mc(a) => commands::mc(&a, threads, &out),
        Command::Oracle(a) => commands::oracle(&a, threads, &out),
        Command::Report(a) => commands::report(&a, threads, &out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
