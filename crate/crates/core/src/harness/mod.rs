//! Experiment harness: oblivious adversaries, brute-force benchmarks, γ-regret records,
//! horizon sweeps with scaling-slope fits, and orthant-approachability experiments.

pub mod adversary;
pub mod approach;
pub mod benchmark;
pub mod config;
pub mod report;
pub mod runner;
pub mod slope;

pub use adversary::{generate_adversary, stream_hash};
pub use benchmark::{compute_benchmark, Benchmark};
pub use config::{AdversaryKind, AdversarySpec, AppConfig, BenchmarkMode, ExperimentConfig, FeedbackMode, NsmFamily};
pub use report::{parse_horizons, report_dir, sweep, SweepSummary};
pub use runner::{execute, read_run_csv, run_experiment, run_instance, write_run_csv, RegretReport, RunOutput, RunRow};
pub use slope::fit_slope;
