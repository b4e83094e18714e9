//! `cbt`: benchmarks, verification suites and a file sorter built on the
//! tournament priority queues in `cbt-core`.

mod bench;
mod output;
mod sort;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use cbt_core::bench::{PriorityDistribution, TimerChoice};
use cbt_core::StructureKind;
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "cbt", version, about = "Tournament priority queue benchmarks and tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run hold and shrink-to-sort benchmarks and write a CSV report.
    Bench(BenchArgs),
    /// Run the pairing, differential and comparison-count suites.
    Verify(VerifyArgs),
    /// Sort `id,priority` lines by priority, largest first.
    Sort(SortArgs),
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Structures to run: marin, marin-vs, reduced, super.
    #[arg(long = "structure", value_delimiter = ',', default_values_t = StructureKind::ALL)]
    structures: Vec<StructureKind>,
    /// Key counts.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// Priority distributions: exponential, uniform, biased.
    #[arg(long = "dist", value_delimiter = ',', default_values_t = PriorityDistribution::ALL)]
    distributions: Vec<PriorityDistribution>,
    /// Metrics to report: hold, sort.
    #[arg(long = "metric", value_delimiter = ',', default_values = ["hold", "sort"], value_parser = ["hold", "sort"])]
    metrics: Vec<String>,
    /// Untimed holds before timing starts.
    #[arg(long, default_value_t = 1_000_000)]
    warmup: usize,
    /// Timed holds per repeat.
    #[arg(long, default_value_t = 1_000_000)]
    ops: usize,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Time source: auto, cycles or monotonic.
    #[arg(long, default_value = "auto")]
    timer: TimerChoice,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Pairing sweep covers active sizes up to this bound.
    #[arg(long, default_value_t = 4096)]
    max_n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Keys in each differential script.
    #[arg(long, default_value_t = 512)]
    keys: usize,
    /// Operations in each differential script.
    #[arg(long, default_value_t = 100_000)]
    ops: usize,
    /// Test hook: use the inclusive sister guard, which must fail the sweep.
    #[arg(long, hide = true)]
    inclusive_sister_guard: bool,
}

#[derive(Debug, Args)]
struct SortArgs {
    /// File of `id,priority` lines.
    input: PathBuf,
    /// Destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write smallest priority first.
    #[arg(long)]
    ascending: bool,
}

/// Failure classes and their exit statuses.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Verification,
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Verification => 2,
            Failure::Io(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Bench(args) => bench::run(args),
        Command::Verify(args) => verify::run(args),
        Command::Sort(args) => sort::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Config(msg) => eprintln!("error: {msg}"),
                Failure::Io(msg) => eprintln!("I/O error: {msg}"),
                Failure::Verification => eprintln!("verification failed"),
            }
            ExitCode::from(f.code())
        }
    }
}
