use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "shellrig", version, about = "Thin-shell rigidity exponents from explicit Ansätze")]
pub struct Cli {
    /// Plain-text `key = value` file; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Progress and diagnostics on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the identity suite and report the largest residual of each check.
    Lemmas(LemmasArgs),
    /// Energies over a thickness sweep, exponent fit and verdict.
    Sweep(SweepArgs),
    /// Refit an exponent from a sweep CSV.
    Fit(FitArgs),
    /// Trace a geodesic and report its straightness.
    Geodesic(GeodesicArgs),
    /// Dump one displacement sample as JSON.
    Inspect(InspectArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct LemmasArgs {
    /// Replace every check threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Restrict to one geometry (`hyperbolic`, `parabolic`, `elliptic` or a chart name).
    #[arg(long)]
    pub geometry: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random points per geometry.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Random matrices for the strain checks.
    #[arg(long)]
    pub matrices: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the JSON report here.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// Ansatz parameters shared by `sweep` and `inspect`.
#[derive(Args, Debug, Default, Clone)]
pub struct ModelArgs {
    #[arg(long)]
    pub geometry: Option<String>,
    /// Built-in chart name (default depends on the geometry).
    #[arg(long)]
    pub chart: Option<String>,
    /// Polynomial chart definition file.
    #[arg(long)]
    pub chart_file: Option<PathBuf>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub half_length: Option<f64>,
}

#[derive(Args, Debug, Default, Clone)]
pub struct GridArgs {
    #[arg(long)]
    pub nodes_per_wavelength: Option<usize>,
    #[arg(long)]
    pub t_nodes: Option<usize>,
    #[arg(long)]
    pub node_cap: Option<u64>,
    /// Multiply every node count.
    #[arg(long)]
    pub refine: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Largest thickness, as a number or `2^-10`.
    #[arg(long)]
    pub h_max: Option<String>,
    /// Smallest thickness.
    #[arg(long)]
    pub h_min: Option<String>,
    /// Number of geometric steps from `h_max` to `h_min`.
    #[arg(long)]
    pub points: Option<usize>,
    /// Second τ; repeats the sweep and requires the slopes to agree.
    #[arg(long)]
    pub alt_tau: Option<f64>,
    /// Quantity to fit: ratio, korn-ratio, grad, sym, defgrad, dist.
    #[arg(long)]
    pub quantity: Option<String>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// CSV destination (default stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// JSON report destination.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// CSV written by `sweep`.
    pub input: PathBuf,
    /// Overrides the geometry recorded in the CSV.
    #[arg(long)]
    pub geometry: Option<String>,
    #[arg(long)]
    pub quantity: Option<String>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GeodesicArgs {
    #[arg(long)]
    pub chart: Option<String>,
    #[arg(long)]
    pub chart_file: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub x1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x2: Option<f64>,
    /// Signed arc length.
    #[arg(long, allow_hyphen_values = true)]
    pub length: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Angle from the first principal direction; default is the flat direction.
    #[arg(long, allow_hyphen_values = true)]
    pub angle: Option<f64>,
    /// CSV of samples (default stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct InspectArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub x1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long)]
    pub h: Option<String>,
    /// Write here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}
