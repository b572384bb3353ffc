//! `fracgibbs`: batch driver for the truncated fractional NLS simulator and
//! its Gibbs-measure Monte Carlo studies.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure,
//! 3 a checked inequality or test failed.

mod commands;
mod config;
mod init;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use fracgibbs_core::measures::{Observable, SamplingMethod, ZeroMode};
use fracgibbs_core::{Gamma, Scheme};

use crate::config::List;

#[derive(Debug)]
pub enum CliError {
    /// Missing or malformed flags; usage text is printed.
    Usage(String),
    Config(String),
    Numerical(String),
}

impl From<fracgibbs_core::Error> for CliError {
    fn from(e: fracgibbs_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(format!("json: {e}"))
    }
}

#[derive(Parser, Debug)]
#[command(name = "fracgibbs", version, about = "Truncated fractional NLS: flows, Gibbs sampling and Monte Carlo studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve one initial state; writes the trajectory CSV and final state.
    Evolve(EvolveArgs),
    /// Draw Gibbs samples (JSON lines) and default observable estimates.
    Sample(SampleArgs),
    /// Paired test of Gibbs-measure invariance under the flow.
    Invariance(InvarianceArgs),
    /// Gaussian tail probabilities of the H^s norm against exp(-K^2/4).
    Tails(TailsArgs),
    /// Truncation error against a high-resolution reference flow.
    Converge(ConvergeArgs),
    /// Partial sums lambda_k and their growth class.
    Lambda(LambdaArgs),
    /// Normalization estimates across truncation sizes.
    Partition(PartitionArgs),
    /// Quantiles of the H^sigma norm along the flow.
    Growth(GrowthArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Flat `key = value` file supplying defaults; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// +1 (focusing) or -1 (defocusing).
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<Gamma>,
    /// Truncation N (modes -N..=N).
    #[arg(long)]
    pub modes: Option<usize>,
    /// Sobolev index.
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct MeasureArgs {
    #[arg(long)]
    pub count: Option<usize>,
    /// rejection | importance
    #[arg(long)]
    pub method: Option<SamplingMethod>,
    /// pinned | gaussian:<sigma0>
    #[arg(long)]
    pub zero_mode: Option<ZeroMode>,
    /// L2 cutoff B (focusing default 2).
    #[arg(long)]
    pub cutoff: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct FlowArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub time: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// strang | rk4 | picard
    #[arg(long)]
    pub scheme: Option<Scheme>,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub flow: FlowArgs,
    /// plane_wave:<n>:<a> | power_law:<s>:<delta>:<seed> | <state.json>
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long)]
    pub record_every: Option<usize>,
    /// Sobolev indices logged along the trajectory.
    #[arg(long)]
    pub log_sigmas: Option<List<f64>>,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub measure: MeasureArgs,
}

#[derive(Args, Debug)]
pub struct InvarianceArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[command(flatten)]
    pub flow: FlowArgs,
    /// e.g. mass,quartic,h_norm_0.1,abs2_mode_2,re_mode_1
    #[arg(long)]
    pub observables: Option<List<Observable>>,
    /// Also report the ensemble of twice the count.
    #[arg(long)]
    pub double: bool,
}

#[derive(Args, Debug)]
pub struct TailsArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[arg(long)]
    pub k_grid: Option<List<f64>>,
}

#[derive(Args, Debug)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub flow: FlowArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub s_prime: Option<f64>,
    #[arg(long)]
    pub n_list: Option<List<usize>>,
    #[arg(long)]
    pub n_ref: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Args, Debug)]
pub struct LambdaArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Write every stride-th partial sum to the CSV.
    #[arg(long)]
    pub csv_stride: Option<usize>,
}

#[derive(Args, Debug)]
pub struct PartitionArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[arg(long)]
    pub n_list: Option<List<usize>>,
}

#[derive(Args, Debug)]
pub struct GrowthArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub scheme: Option<Scheme>,
    #[arg(long)]
    pub checkpoints: Option<List<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
}

/// What a command reports on standard output, and whether its checked
/// inequality (if any) held.
pub struct Outcome {
    pub summary: String,
    pub passed: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (name, result) = match cli.command {
        Command::Evolve(a) => ("evolve", commands::evolve(a)),
        Command::Sample(a) => ("sample", commands::sample(a)),
        Command::Invariance(a) => ("invariance", commands::invariance(a)),
        Command::Tails(a) => ("tails", commands::tails(a)),
        Command::Converge(a) => ("converge", commands::converge(a)),
        Command::Lambda(a) => ("lambda", commands::lambda(a)),
        Command::Partition(a) => ("partition", commands::partition(a)),
        Command::Growth(a) => ("growth", commands::growth(a)),
    };
    match result {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("{name}: check failed");
                ExitCode::from(3)
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n");
            let mut cmd = Cli::command();
            cmd.build();
            if let Some(sub) = cmd.find_subcommand_mut(name) {
                eprintln!("{}", sub.render_usage());
            }
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
    }
}
