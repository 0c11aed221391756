use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "besq", version, about = "Squared Bessel processes: densities, samplers, hitting times, identity checks")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transition density q_t(x0, .) of BESQ, or p_t of the Bessel process, on a grid.
    Density(DensityArgs),
    /// Exact draws of R(t), X(t, a), correlated pairs or post-hitting values.
    Sample {
        #[command(subcommand)]
        kind: SampleKind,
    },
    /// First-hitting-time density of level y from 1.
    Hitting(HittingArgs),
    /// P(tau_y <= t | R(T) = x) over one time or a grid of times.
    Cond(CondArgs),
    /// Runs the identity suite and writes the report.
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum SampleKind {
    /// R(t) started at x0.
    Besq(SampleArgs),
    /// X(t, a) = R(t + a R(t)) / R(t).
    Xta(SampleArgs),
    /// (X(t, a), R(t + a)) from one path.
    Pair(SampleArgs),
    /// R(tau_y + eps y); paths that miss y before the cap are left out.
    Posthit(SampleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityKind {
    Besq,
    Bessel,
}

/// Flags shared by every subcommand. `mu` and `delta` are alternatives:
/// give one, or both if they agree.
#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct Common {
    /// Index mu >= 0 (0 when neither --mu nor --delta is given).
    #[arg(long, global = true)]
    pub mu: Option<f64>,
    /// Dimension delta = 2 (mu + 1).
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (standard output when absent).
    #[arg(long = "out", global = true)]
    pub out_path: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// JSON file whose keys pre-populate the flags.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct DensityArgs {
    #[arg(long)]
    pub t: Option<f64>,
    /// Starting point (default 1).
    #[arg(long)]
    pub x0: Option<f64>,
    /// Evaluation points `lo:hi:step`, half-open at `hi`.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, value_enum)]
    pub kind: Option<DensityKind>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SampleArgs {
    #[arg(short = 'n', long)]
    pub n_samples: Option<usize>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    /// Starting point for `besq` (default 1).
    #[arg(long)]
    pub x0: Option<f64>,
    /// Level for `posthit`.
    #[arg(long)]
    pub y: Option<f64>,
    /// Post-hitting time in units of y, for `posthit`.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Grid step of first-passage detection (default 1e-4).
    #[arg(long)]
    pub step: Option<f64>,
    /// Give up on a path after this much time (default 1e4).
    #[arg(long)]
    pub cap: Option<f64>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct HittingArgs {
    #[arg(long)]
    pub y: Option<f64>,
    /// Right end of the time grid (default 10).
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Mesh size (default 512).
    #[arg(long)]
    pub n_steps: Option<usize>,
    /// Anchor point of the hitting equation (default 2y above 1, y/2 below).
    #[arg(long)]
    pub x: Option<f64>,
    /// direct, laplace or kernel.
    #[arg(long)]
    pub method: Option<String>,
    /// Also estimate the hitting CDF by Monte Carlo and report the Kolmogorov distance.
    #[arg(long)]
    #[serde(skip_serializing_if = "is_false")]
    pub check: bool,
    /// Paths for --check (default 10000).
    #[arg(long)]
    pub mc_n: Option<usize>,
    /// Grid step for --check (default 1e-4).
    #[arg(long)]
    pub mc_step: Option<f64>,
    /// Allowed total-mass error before exiting with status 3 (default 1e-2).
    #[arg(long)]
    pub mass_tol: Option<f64>,
    /// Allowed relative residual and clipped mass (default 1e-3).
    #[arg(long)]
    pub residual_tol: Option<f64>,
    /// Allowed Kolmogorov distance for --check (default 0.02).
    #[arg(long)]
    pub mc_tol: Option<f64>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CondArgs {
    #[arg(long)]
    pub y: Option<f64>,
    /// Conditioning time.
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub big_t: Option<f64>,
    /// One evaluation time in (0, T].
    #[arg(long, conflicts_with = "t_grid")]
    pub t: Option<f64>,
    /// Evaluation times `lo:hi:step`, half-open at `hi`.
    #[arg(long)]
    pub t_grid: Option<String>,
    /// Conditioning value R(T) = x.
    #[arg(long)]
    pub x: Option<f64>,
    /// Mesh size of the hitting-density solve (default 400).
    #[arg(long)]
    pub n_steps: Option<usize>,
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyArgs {
    /// Run only these identities (repeatable or comma separated).
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub only: Vec<String>,
    /// Skip these identities in addition to the configured ones.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub skip: Vec<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub n_samples: Option<usize>,
    #[arg(long)]
    pub n_moment: Option<usize>,
    #[arg(long)]
    pub n_hitting: Option<usize>,
    #[arg(long)]
    pub hitting_step: Option<f64>,
    #[arg(long)]
    pub solver_steps: Option<usize>,
}

fn is_false(b: &bool) -> bool {
    !*b
}
