use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Sparse sensor placement experiments: synthetic data, QR-pivoted sensor
/// selection, Monte-Carlo sweeps and multi-fidelity budget studies.
#[derive(Debug, Parser)]
#[command(name = "sparsesense", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Master seed (falls back to SPARSESENSE_SEED, then 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads; 0 lets the pool decide.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Directory for relative output paths and the run manifest.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    /// Flat `key = value` file using flag names as keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic dataset with a power-law spectrum.
    Synth(SynthArgs),
    /// Place sensors on one training split and list them.
    Place(PlaceArgs),
    /// Mean error over a grid of mode and sensor counts.
    Sweep(SweepArgs),
    /// Cheap/expensive composition sweep under a budget.
    Mf(MfArgs),
    /// Aggregate composition results into a regime table.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Spectrum amplitude.
    #[arg(long)]
    pub a: Option<f64>,
    /// Spectrum exponent.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// State dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Snapshot count.
    #[arg(long)]
    pub m: Option<usize>,
    /// Nonzero singular values; defaults to min(n, m).
    #[arg(long)]
    pub n_sv: Option<usize>,
    /// Output file; `.bin` is binary, anything else CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct TrialArgs {
    /// Train/test splits.
    #[arg(long)]
    pub splits: Option<usize>,
    /// Placement repeats per split.
    #[arg(long)]
    pub cv: Option<usize>,
    /// Noise draws per placement.
    #[arg(long)]
    pub noise_draws: Option<usize>,
    /// Fraction of snapshots used for training.
    #[arg(long)]
    pub train_fraction: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PlaceArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// `svd` or `randomized`.
    #[arg(long)]
    pub basis: Option<String>,
    /// Mode count.
    #[arg(long, short = 'r')]
    pub r: Option<usize>,
    /// Sensor count.
    #[arg(long, short = 'p')]
    pub p: Option<usize>,
    /// `random` or `odeim-e`.
    #[arg(long)]
    pub oversample: Option<String>,
    #[arg(long)]
    pub train_fraction: Option<f64>,
    /// Split index the training set is drawn from.
    #[arg(long)]
    pub split: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub basis: Option<String>,
    /// Comma-separated mode counts.
    #[arg(long, short = 'r', value_delimiter = ',')]
    pub r: Option<Vec<usize>>,
    /// Comma-separated sensor counts.
    #[arg(long, short = 'p', value_delimiter = ',')]
    pub p: Option<Vec<usize>>,
    /// Sensor noise as a fraction of the training variance.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub oversample: Option<String>,
    #[command(flatten)]
    pub trials: TrialArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also draw the curves.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MfArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub basis: Option<String>,
    /// Cheap sensors affordable with the whole budget.
    #[arg(long)]
    pub p_cheap_max: Option<usize>,
    /// Expensive sensors affordable with the whole budget.
    #[arg(long)]
    pub p_exp_max: Option<usize>,
    /// Unit cost of a cheap sensor.
    #[arg(long)]
    pub cost_cheap: Option<f64>,
    /// Budget fractions between the endpoints, endpoints included.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub noise_cheap: Option<f64>,
    #[arg(long)]
    pub noise_exp: Option<f64>,
    /// `exp-first` or `exp-last`.
    #[arg(long)]
    pub assignment: Option<String>,
    /// Absolute error band for the regime label.
    #[arg(long)]
    pub band: Option<f64>,
    #[arg(long)]
    pub oversample: Option<String>,
    #[arg(long)]
    pub mode_threshold: Option<usize>,
    #[arg(long)]
    pub mode_factor: Option<usize>,
    #[command(flatten)]
    pub trials: TrialArgs,
    /// Tags recorded for `report`.
    #[arg(long, allow_hyphen_values = true)]
    pub tag_b: Option<String>,
    #[arg(long)]
    pub noise_regime: Option<String>,
    #[arg(long)]
    pub sensor_regime: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Composition result files written by `mf`.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
