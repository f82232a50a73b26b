//! `msts`: solve, generate, validate, compare, benchmark and render
//! segment-MST instances.
//!
//! Exit codes: 0 success, 2 parse or usage error, 3 infeasible input or
//! solver guard, 4 internal assertion (repair factor violated).

mod commands;
mod output;
mod solve;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "msts",
    version,
    about = "Minimum spanning trees over segment endpoints"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one instance and write an MSTS-SOL file.
    Solve(SolveArgs),
    /// Generate an instance.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Check an instance (and optionally a solution against it).
    Validate(ValidateArgs),
    /// Run several algorithms on one instance and tabulate them.
    Compare(CompareArgs),
    /// Run algorithms over a directory of instances.
    Bench(BenchArgs),
    /// Draw an instance, optionally with a solution, as SVG.
    Render(RenderArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Exact,
    Steiner,
    Pick,
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    A,
    B,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Msts,
    MinMsts,
}

#[derive(Args, Debug, Clone)]
pub struct SolverOpts {
    /// Endpoint policy for `pick`.
    #[arg(long, value_enum, default_value_t = Policy::A)]
    pub policy: Policy,
    /// Seed for `--policy random`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Search node limit for `exact` (0 = none).
    #[arg(long, default_value_t = 0)]
    pub node_budget: u64,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long, value_enum, default_value_t = Algo::Auto)]
    pub algo: Algo,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also run the exact solver and report the gap.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(flatten)]
    pub opts: SolverOpts,
}

#[derive(Subcommand, Debug)]
pub enum GenCommand {
    /// Random pairwise-disjoint segments.
    Random(GenRandomArgs),
    /// Gadget instance from a 2-CNF formula in DIMACS form.
    FromCnf(GenCnfArgs),
}

#[derive(Args, Debug)]
pub struct GenRandomArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Minimum distance between segments.
    #[arg(long, default_value_t = 0.0)]
    pub separation: f64,
    /// Maximum segment length.
    #[arg(long, default_value_t = 1.0)]
    pub length: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenCnfArgs {
    #[arg(long)]
    pub cnf: PathBuf,
    #[arg(long, value_enum, default_value_t = VariantArg::Msts)]
    pub variant: VariantArg,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Instance file; the role map goes to `<out>.roles`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub sol: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Comma-separated algorithms.
    #[arg(long, value_delimiter = ',', default_value = "exact,steiner,pick")]
    pub algos: Vec<Algo>,
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(flatten)]
    pub opts: SolverOpts,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Directory of `*.msts` instance files.
    #[arg(long)]
    pub suite: PathBuf,
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub algos: Vec<Algo>,
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,
    /// Largest instance the exact oracle is run on.
    #[arg(long, default_value_t = 16)]
    pub oracle_max: usize,
    /// Also write one JSON report per run to this file.
    #[arg(long)]
    pub jsonl: Option<PathBuf>,
    #[command(flatten)]
    pub opts: SolverOpts,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub sol: Option<PathBuf>,
    /// Role map from `gen from-cnf`; defaults to `<in>.roles` when present.
    #[arg(long)]
    pub roles: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("MSTS_LOG"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let res = match cli.cmd {
        Command::Solve(a) => commands::solve(a),
        Command::Gen(GenCommand::Random(a)) => commands::gen_random(a),
        Command::Gen(GenCommand::FromCnf(a)) => commands::gen_cnf(a),
        Command::Validate(a) => commands::validate(a),
        Command::Compare(a) => commands::compare(a),
        Command::Bench(a) => commands::bench(a),
        Command::Render(a) => commands::render(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(output::exit_code(&e))
        }
    }
}
