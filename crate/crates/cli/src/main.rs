// SPDX-License-Identifier: MIT OR Apache-2.0

//! `wildseg`: change-point detection, simulation, benchmarks and
//! time-threshold maps from the command line.
//!
//! All locations are 1-based: a change-point at `b` means the segments are
//! `..=b` and `b+1..`.

mod commands;
mod input;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand, ValueEnum};
use wildseg_core::Method;

#[derive(Parser, Debug)]
#[command(
    name = "wildseg",
    version,
    about = "Wild binary segmentation change-point detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Detect change-points in a single-column CSV series.
    Detect(DetectArgs),
    /// Write a test or random signal plus noise as CSV.
    Simulate(SimulateArgs),
    /// Run a Monte-Carlo comparison of methods.
    Bench(BenchArgs),
    /// Emit time-threshold map rows for plotting.
    Ttmap(TtmapArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum MethodArg {
    Wbs,
    Bs,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Wbs => Method::Wbs,
            MethodArg::Bs => Method::Bs,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub(crate) enum Stopping {
    Threshold,
    Ssic,
}

impl Stopping {
    pub(crate) fn name(self) -> &'static str {
        match self {
            Stopping::Threshold => "threshold",
            Stopping::Ssic => "ssic",
        }
    }
}

#[derive(clap::Args, Debug)]
pub(crate) struct DetectArgs {
    /// Input CSV, or `-` for standard input.
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Wbs)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = Stopping::Ssic)]
    stopping: Stopping,
    /// Threshold constant [default: 1.0].
    #[arg(long = "C", value_name = "C")]
    c: Option<f64>,
    /// Number of random intervals.
    #[arg(long = "M", value_name = "M", default_value_t = 5000)]
    m: usize,
    #[arg(long, env = "WILDSEG_SEED", default_value_t = 0)]
    seed: u64,
    /// Also consider each segment itself as an interval.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    augment: bool,
    /// sSIC penalty exponent [default: 1.01].
    #[arg(long)]
    alpha: Option<f64>,
    /// Largest model size for sSIC [default: 20].
    #[arg(long = "K", value_name = "K")]
    k: Option<usize>,
    /// Noise sd; overrides the MAD estimate.
    #[arg(long)]
    sigma: Option<f64>,
    /// Re-estimate each location between its neighbours' midpoints.
    #[arg(long, default_value_t = false, action = ArgAction::Set)]
    refine: bool,
    /// Output JSON path [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub(crate) struct SimulateArgs {
    /// blocks, fms, mix, teeth10, stairs10, motivating or random.
    #[arg(long)]
    model: String,
    /// Noise sd [default: the model's standard level; 0.3 for motivating, 1 for random].
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long, env = "WILDSEG_SEED", default_value_t = 0)]
    seed: u64,
    /// Mean number of change-points (random model).
    #[arg(long)]
    navg: Option<f64>,
    /// Variance of jump sizes (random model).
    #[arg(long)]
    sjmp2: Option<f64>,
    /// Series length (random model).
    #[arg(long = "T", value_name = "T")]
    len: Option<usize>,
    /// Output CSV path [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the true signal as JSON.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub(crate) struct BenchArgs {
    /// Comma-separated: `name`, `name:sigma` or `random:navg:sjmp2:T[:sigma]`.
    #[arg(long, value_delimiter = ',', required = true)]
    models: Vec<String>,
    /// Comma-separated, e.g. `wbs-ssic,wbs-c1,bs-c1`.
    #[arg(long, value_delimiter = ',', required = true)]
    methods: Vec<String>,
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long, env = "WILDSEG_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long = "M", value_name = "M", default_value_t = 5000)]
    m: usize,
    /// Directory for distribution.csv, summary.csv and report.json
    /// [default: distribution table on stdout].
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
pub(crate) struct TtmapArgs {
    /// Input CSV, or `-` for standard input.
    input: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    zeta_min: f64,
    #[arg(long, default_value_t = 5.0)]
    zeta_max: f64,
    #[arg(long = "M", value_name = "M", default_value_t = 5000)]
    m: usize,
    #[arg(long, env = "WILDSEG_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    augment: bool,
    /// Output CSV path [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Bad flag values or combinations; exits with status 2.
#[derive(Debug)]
pub(crate) struct UsageError(String);

impl UsageError {
    pub(crate) fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Detect(a) => commands::detect_cmd(a),
        Command::Simulate(a) => commands::simulate_cmd(a),
        Command::Bench(a) => commands::bench_cmd(a),
        Command::Ttmap(a) => commands::ttmap_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) if err.is::<UsageError>() => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
