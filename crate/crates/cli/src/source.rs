use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use specbound::io::{read_rect, read_variance_matrix};
use specbound::linalg::{gram_linearize, Construction, VarianceMatrix};

use crate::Failure;

#[derive(Args, Clone, Debug, Serialize)]
#[group(required = true, multiple = false, id = "source")]
pub struct SourceArgs {
    /// Built-in profile: wigner, expprofile, zero, random:<seed> or
    /// gram:<path> (rectangular file, linearized)
    #[arg(long)]
    pub profile: Option<String>,
    /// Square variance matrix file (plain `N` header or CSV `n=N` header)
    #[arg(long)]
    pub matrix: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct SourceOptions {
    /// Dimension for generated profiles
    #[arg(long)]
    pub n: Option<usize>,
    /// Symmetrize and clamp slightly broken input instead of rejecting it
    #[arg(long)]
    pub repair: bool,
}

/// Where the matrix came from, as recorded in every report.
#[derive(Clone, Debug, Serialize)]
pub struct SourceInfo {
    pub kind: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// `(rows, cols)` of the rectangular profile behind a linearization.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gram: Option<(usize, usize)>,
}

pub struct Loaded {
    pub s: VarianceMatrix,
    pub info: SourceInfo,
}

fn construction(opts: &SourceOptions) -> Construction {
    if opts.repair {
        Construction::Repair
    } else {
        Construction::Strict
    }
}

pub fn load(src: &SourceArgs, opts: &SourceOptions, default_n: usize) -> Result<Loaded, Failure> {
    if let Some(path) = &src.matrix {
        let s = read_variance_matrix(path, construction(opts)).map_err(Failure::library)?;
        return Ok(Loaded {
            info: SourceInfo {
                kind: "matrix".into(),
                n: s.n(),
                path: Some(path.clone()),
                seed: None,
                gram: None,
            },
            s,
        });
    }
    let profile = src.profile.as_deref().expect("clap enforces one source");
    let n = opts.n.unwrap_or(default_n);
    let mut info = SourceInfo {
        kind: profile.to_string(),
        n,
        path: None,
        seed: None,
        gram: None,
    };
    let s = match profile {
        "wigner" => VarianceMatrix::wigner(n),
        "expprofile" => VarianceMatrix::exp_profile(n),
        "zero" => VarianceMatrix::zeros(n),
        other => {
            if let Some(seed) = other.strip_prefix("random:") {
                let seed: u64 = seed
                    .parse()
                    .map_err(|_| Failure::input(format!("invalid seed in `{other}`")))?;
                info.kind = "random".into();
                info.seed = Some(seed);
                VarianceMatrix::seeded_uniform(n, seed)
            } else if let Some(path) = other.strip_prefix("gram:") {
                let path = PathBuf::from(path);
                let rect = read_rect(&path).map_err(Failure::library)?;
                info.kind = "gram".into();
                info.n = rect.rows + rect.cols;
                info.path = Some(path);
                info.gram = Some((rect.rows, rect.cols));
                gram_linearize(rect.rows, rect.cols, &rect.entries)
            } else {
                return Err(Failure::input(format!(
                    "unknown profile `{other}` (expected wigner, expprofile, zero, random:<seed> or gram:<path>)"
                )));
            }
        }
    }
    .map_err(Failure::library)?;
    Ok(Loaded { s, info })
}
