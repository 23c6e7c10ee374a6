//! Command-line harness: `run`, `sweep`, and `report`.

use std::path::PathBuf;
use std::process::ExitCode;

use blackgreedy::harness::{self, ExperimentConfig};
use blackgreedy::Error;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "blackgreedy", version, about = "Online iterative greedy: γ-regret experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its per-round CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run every (horizon, seed) pair in parallel, one CSV per run.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// `2^10..2^18` or a comma-separated list.
        #[arg(long, default_value = "2^10..2^18")]
        horizons: String,
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        /// Directory for run records; defaults to `$BLACKGREEDY_OUT_DIR` or `./sweep`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Summarise a directory of run records: mean ± standard error of final γ-regret per horizon.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_contract_violation() {
        3
    } else if matches!(e, Error::Config(_) | Error::BadParams(_) | Error::Json(_) | Error::TooLargeToEnumerate { .. }) {
        2
    } else {
        1
    }
}

fn run(cli: Cli) -> blackgreedy::Result<()> {
    match cli.cmd {
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let (out, path) = harness::execute(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&out.report)?);
            println!("record: {}", path.display());
        }
        Command::Sweep { config, horizons, seeds, out_dir } => {
            let cfg = ExperimentConfig::load(&config)?;
            let horizons = harness::parse_horizons(&horizons)?;
            let dir = out_dir
                .or_else(|| std::env::var_os(harness::config::OUT_DIR_ENV).map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("sweep"));
            let reports = harness::sweep(&cfg, &horizons, seeds, &dir)?;
            let finals: Vec<(usize, f64)> = reports.iter().map(|r| (r.horizon, r.gamma_regret)).collect();
            print_summary(&harness::report::summarize(&finals));
            println!("records: {}", dir.display());
        }
        Command::Report { input, out } => {
            let summary = harness::report_dir(&input, &out)?;
            print_summary(&summary);
            println!("summary: {}", out.display());
        }
    }
    Ok(())
}

fn print_summary(s: &harness::SweepSummary) {
    println!("{:>10} {:>5} {:>14} {:>12}", "horizon", "runs", "mean_regret", "stderr");
    for h in &s.horizons {
        println!("{:>10} {:>5} {:>14.4} {:>12.4}", h.horizon, h.runs, h.mean_gamma_regret, h.stderr);
    }
    match &s.slope {
        Ok(slope) => println!("log-log slope: {slope:.4}"),
        Err(e) => println!("log-log slope: n/a ({e})"),
    }
}
