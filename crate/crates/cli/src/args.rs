use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "cogsim",
    version,
    about = "Simulate Wordle players, fit their hyperparameters and score word difficulty"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// TOML config file; command-line flags override its values
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Seed for all randomness [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads [default: all cores]
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output directory [default: .]
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Guess weighting: cap = min(p, T * p_max), plain = p * T [default: cap]
    #[arg(long, global = true)]
    pub weighting: Option<WeightingArg>,
    /// Increase log verbosity (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    Cap,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaselineSource {
    /// Observed distribution of the baseline word in the ground truth
    Truth,
    /// Simulated distribution of the baseline word under the same (K, T)
    Simulated,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load the input files and write a validation report
    Validate(ValidateArgs),
    /// Fit (K, T) to ground truth by coordinate search; writes params.json
    Fit(FitArgs),
    /// Simulate the trial distribution of one word; writes dist.json
    Simulate(SimulateArgs),
    /// Predict a word's distribution and difficulty; writes difficulty.json
    Difficulty(DifficultyArgs),
    /// K-fold evaluation; writes eval_report.json, difficulty_histogram.csv, folds.json, features.csv
    Evaluate(EvaluateArgs),
    /// Replicate band and 2-D fPCA projection; writes band.json and fpca.csv
    Project(ProjectArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct DataArgs {
    /// Dictionary CSV with header `word,frequency`
    #[arg(long, value_name = "FILE")]
    pub dict: Option<PathBuf>,
    /// Ground-truth CSV (date, word, num_reported, 1..6, X percentages)
    #[arg(long, value_name = "FILE")]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SearchArgs {
    /// K grid as start:end[:step] [default: 10:2000:10]
    #[arg(long, value_name = "A:B[:S]")]
    pub k_range: Option<String>,
    /// T interval as lo:hi [default: 0.01:2.0]
    #[arg(long, value_name = "LO:HI")]
    pub t_range: Option<String>,
    /// Number of evenly spaced T grid points [default: 50]
    #[arg(long)]
    pub t_grid: Option<usize>,
    /// Starting K, snapped to the grid [default: middle of the K grid]
    #[arg(long)]
    pub k0: Option<usize>,
    /// Starting T, snapped to the grid [default: middle of the T grid]
    #[arg(long)]
    pub t0: Option<f64>,
    /// Maximum coordinate-search iterations [default: 10]
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Stop once an iteration improves the objective by no more than this [default: 0]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Simulated games per word [default: 1000]
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Baseline word to look for in the ground truth [default: train]
    #[arg(long)]
    pub baseline: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct HyperparamArgs {
    /// Cognitive limit K
    #[arg(long)]
    pub k: Option<usize>,
    /// Scale factor T
    #[arg(long)]
    pub t: Option<f64>,
    /// Read K, T, weighting, samples, seed and input paths from a fit's params.json
    #[arg(long, value_name = "FILE")]
    pub params: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Target word
    #[arg(long)]
    pub word: String,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub hp: HyperparamArgs,
    /// Simulated games [default: 1000]
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct DifficultyArgs {
    /// Target word
    #[arg(long)]
    pub word: String,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub hp: HyperparamArgs,
    /// Simulated games [default: 1000]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Baseline (easiest) word [default: train]
    #[arg(long)]
    pub baseline: Option<String>,
    /// Where the baseline distribution comes from [default: truth if ground truth is given, else simulated]
    #[arg(long, value_enum)]
    pub baseline_source: Option<BaselineSource>,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Number of cross-validation folds [default: 5]
    #[arg(long)]
    pub folds: Option<usize>,
    /// Baseline word for difficulties [default: train]
    #[arg(long)]
    pub baseline: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ProjectArgs {
    /// Word to replicate [default: eerie]
    #[arg(long)]
    pub word: Option<String>,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub hp: HyperparamArgs,
    /// Simulated games per replicate [default: 1000]
    #[arg(long)]
    pub samples: Option<usize>,
    /// Number of replicates [default: 200]
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Central band level in (0, 1) [default: 0.95]
    #[arg(long)]
    pub level: Option<f64>,
}
