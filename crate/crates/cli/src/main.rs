mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dtf_core::learn::Criterion;

/// Discrete tree flows: fit, evaluate, sample and audit categorical density models.
#[derive(Debug, Parser)]
#[command(name = "dtf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic train/test pair as CSV.
    Gen(GenArgs),
    /// Fit a model on a CSV and write it as JSON.
    Fit(FitArgs),
    /// Report the mean negative log-likelihood of a CSV under a model.
    Eval(EvalArgs),
    /// Draw rows from a model.
    Sample(SampleArgs),
    /// Audit the invertibility of every tree in a model.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Dataset {
    #[value(name = "8gauss")]
    EightGauss,
    Copula,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    dataset: Dataset,
    /// Target total correlation of the copula, in nats.
    #[arg(long)]
    tc: Option<f64>,
    /// Comma-separated Bernoulli parameters, one per copula feature.
    #[arg(long, value_delimiter = ',')]
    p: Option<Vec<f64>>,
    /// Total rows; 80% go to train.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, env = "DTF_SEED")]
    seed: u64,
    #[arg(long)]
    out_train: PathBuf,
    #[arg(long)]
    out_test: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CriterionArg {
    Glp,
    Random,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Glp => Criterion::Glp,
            CriterionArg::Random => Criterion::Random,
        }
    }
}

#[derive(Debug, Args)]
struct FitArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long, value_enum, default_value = "glp")]
    criterion: CriterionArg,
    #[arg(long, default_value_t = 1)]
    num_tsps: usize,
    #[arg(long, default_value_t = 2)]
    max_depth: usize,
    #[arg(long, default_value_t = 2)]
    min_split: usize,
    /// Additive smoothing of the base marginals.
    #[arg(long, default_value_t = 1.0)]
    pseudocount: f64,
    #[arg(long, env = "DTF_SEED")]
    seed: u64,
    #[arg(long)]
    model: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Print `row,nll` CSV on stdout; the summary moves to stderr.
    #[arg(long)]
    per_row: bool,
    /// Report in bits instead of nats.
    #[arg(long)]
    bits: bool,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long, env = "DTF_SEED")]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long)]
    model: PathBuf,
    /// Training data; adds a rank-consistency check per tree.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Also push every configuration through each tree.
    #[arg(long)]
    exhaustive: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let outcome = match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Fit(a) => commands::fit(a),
        Command::Eval(a) => commands::eval(a),
        Command::Sample(a) => commands::sample(a),
        Command::Check(a) => commands::check(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
