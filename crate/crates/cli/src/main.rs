//! `fairsurv`: train, evaluate, cross-validate and audit fair survival forests
//! from delimited files.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fairsurv::fsrf::{ForestParams, SplitCriterion};

#[derive(Parser)]
#[command(name = "fairsurv", version, about = "Fair survival random forests and fairness audits")]
struct Cli {
    /// Worker threads; defaults to all cores. Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a forest and write the model file.
    Train(TrainArgs),
    /// Score a dataset with a trained model.
    Evaluate(EvaluateArgs),
    /// Write per-record risks (and survival at --time) as CSV.
    Predict(PredictArgs),
    /// k-fold cross-validation of the forest.
    Cv(CvArgs),
    /// Fair calibration verdict and per-group decile plot data.
    Calibrate(CalibrateArgs),
    /// Write a synthetic biased dataset and its schema.
    Synth(SynthArgs),
}

#[derive(Args, Clone)]
pub(crate) struct DataArgs {
    /// Delimited data file with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Schema TOML file, or the name of a bundled schema (support, rossi, compas, kkbox).
    #[arg(long)]
    schema: String,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub(crate) enum Criterion {
    /// Fair survival difference.
    Fsd,
    /// Logrank statistic only.
    Logrank,
}

#[derive(Args, Clone)]
pub(crate) struct ForestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trees: usize,
    #[arg(long, default_value_t = 15)]
    min_leaf: usize,
    /// Features tried per split; default ceil(sqrt(#features)).
    #[arg(long)]
    mtry: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
    /// Grow every tree on the full data instead of a bootstrap sample.
    #[arg(long)]
    no_bootstrap: bool,
    #[arg(long, value_enum, default_value_t = Criterion::Fsd)]
    criterion: Criterion,
}

impl ForestArgs {
    pub(crate) fn params(&self) -> ForestParams {
        ForestParams {
            n_trees: self.trees,
            mtry: self.mtry,
            min_leaf: self.min_leaf,
            max_depth: self.max_depth,
            bootstrap: !self.no_bootstrap,
            criterion: match self.criterion {
                Criterion::Fsd => SplitCriterion::FairSurvivalDifference,
                Criterion::Logrank => SplitCriterion::LogrankOnly,
            },
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub(crate) enum Format {
    Table,
    Json,
}

#[derive(Args, Clone)]
pub(crate) struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub(crate) struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    forest: ForestArgs,
    /// Where to write the model.
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
pub(crate) struct EvaluateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    model: PathBuf,
    /// Risk scores to evaluate instead of the model's, one per data row
    /// (a single column, header optional).
    #[arg(long)]
    risks: Option<PathBuf>,
    /// Evaluation time; default is the median event time.
    #[arg(long)]
    time: Option<f64>,
    #[arg(long, default_value_t = fairsurv::fairness::DEFAULT_BINS)]
    bins: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
pub(crate) struct CvArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    forest: ForestArgs,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long)]
    time: Option<f64>,
    #[arg(long, default_value_t = fairsurv::fairness::DEFAULT_BINS)]
    bins: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
pub(crate) struct PredictArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    model: PathBuf,
    /// Also write the predicted survival probability at this time.
    #[arg(long)]
    time: Option<f64>,
    /// Write the predictions here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub(crate) struct CalibrateArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    time: Option<f64>,
    #[arg(long, default_value_t = fairsurv::fairness::DEFAULT_BINS)]
    bins: usize,
    /// Per-group bin table for plotting (CSV, or JSON when the path ends in .json).
    #[arg(long)]
    plot: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
pub(crate) struct SynthArgs {
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    group_fraction: f64,
    #[arg(long, default_value_t = 2.0)]
    hazard_ratio: f64,
    #[arg(long, default_value_t = 0.3)]
    censor_rate: f64,
    #[arg(long, default_value_t = 5)]
    features: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV file to write.
    #[arg(long)]
    out: PathBuf,
    /// Matching schema file; defaults to the CSV path with a .toml extension.
    #[arg(long)]
    schema_out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::FAILURE;
        }
    }
    let result = match cli.command {
        Command::Train(a) => commands::train(&a),
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Predict(a) => commands::predict(&a),
        Command::Cv(a) => commands::cv(&a),
        Command::Calibrate(a) => commands::calibrate(&a),
        Command::Synth(a) => commands::synth(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
