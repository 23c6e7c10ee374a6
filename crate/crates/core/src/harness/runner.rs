//! Runs an experiment and persists its per-round record as CSV.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::adversary::generate_adversary;
use super::benchmark::compute_benchmark;
use super::config::{AppConfig, BenchmarkMode, ExperimentConfig, FeedbackMode, NsmFamily};
use crate::apps::monotone_sm::CardinalityInstance;
use crate::apps::nsm::{LatticeInstance, TableLattice};
use crate::apps::ranking::{sample_user_population, RankingInstance};
use crate::apps::reserves::{load_valuations_csv, PriceGrid, ReserveInstance, ValuationProfile};
use crate::apps::CoverageFunction;
use crate::error::{Error, Result};
use crate::framework::{split_rng, GreedyInstance, SharedObjective, SimRng};
use crate::transform::{BanditIg, BanditSignal, LearnerKind, OnlineIg};

/// One CSV row of a run record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub t: usize,
    pub reward: f64,
    pub cum_reward: f64,
    pub cum_gamma_opt: f64,
    pub cum_gamma_regret: f64,
    /// Subproblem that explored this round, −1 if none.
    pub explored_subproblem: i64,
    pub seed: u64,
}

/// Summary of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegretReport {
    pub app: String,
    pub feedback: FeedbackMode,
    pub horizon: usize,
    pub seed: u64,
    pub gamma: f64,
    pub benchmark: String,
    pub opt_sum: f64,
    pub cum_reward: f64,
    pub cum_gamma_opt: f64,
    pub gamma_regret: f64,
    pub explored_rounds: usize,
    pub oracle_calls: usize,
    pub max_saddle_value: f64,
    pub unconverged_solves: usize,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub rows: Vec<RunRow>,
    pub report: RegretReport,
}

/// Learner-side settings of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunParams {
    pub feedback: FeedbackMode,
    pub signal: BanditSignal,
    pub learner: LearnerKind,
    pub doubling: bool,
    pub seed: u64,
    pub benchmark: BenchmarkMode,
}

impl RunParams {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        Self {
            feedback: cfg.feedback,
            signal: cfg.bandit_signal,
            learner: cfg.learner,
            doubling: cfg.doubling,
            seed: cfg.seed,
            benchmark: cfg.benchmark,
        }
    }
}

/// Plays the online algorithm over `stream` and measures γ-regret against the benchmark.
/// In bandit mode, fails unless `f_t` was queried exactly once per round.
pub fn run_instance<I: GreedyInstance>(
    instance: &I,
    stream: &[SharedObjective<I::Point>],
    params: &RunParams,
    app: &str,
) -> Result<RunOutput> {
    let horizon = stream.len();
    if horizon == 0 {
        return Err(Error::Config("empty stream".into()));
    }
    let bench = compute_benchmark(instance, stream, params.benchmark, params.seed)?;
    let gamma = instance.gamma();
    let mut rng = split_rng(params.seed, 1);
    let known = if params.doubling { None } else { Some(horizon) };
    let mut rows = Vec::with_capacity(horizon);
    let (mut cum_reward, mut cum_opt) = (0.0, 0.0);
    let mut record = |t: usize, reward: f64, explored: Option<usize>| {
        cum_reward += reward;
        cum_opt += gamma * bench.per_round[t];
        rows.push(RunRow {
            t: t + 1,
            reward,
            cum_reward,
            cum_gamma_opt: cum_opt,
            cum_gamma_regret: cum_opt - cum_reward,
            explored_subproblem: explored.map_or(-1, |i| i as i64),
            seed: params.seed,
        });
    };
    let (oracle_calls, stats) = match params.feedback {
        FeedbackMode::Full => {
            let mut alg = OnlineIg::new(instance, known, params.learner)?;
            for (t, f) in stream.iter().enumerate() {
                let trace = alg.play_round(f.as_ref(), &mut rng)?;
                record(t, trace.reward, None);
            }
            (0, alg.stats())
        }
        FeedbackMode::Bandit => {
            let mut alg = BanditIg::new(instance, known, params.signal, params.seed);
            for (t, f) in stream.iter().enumerate() {
                let trace = alg.play_round(f.as_ref(), &mut rng)?;
                record(t, trace.reward, trace.explored);
            }
            if alg.oracle_calls() != horizon {
                return Err(Error::BanditContractViolation { calls: alg.oracle_calls() });
            }
            (alg.oracle_calls(), alg.stats())
        }
    };
    let last = rows.last().expect("horizon ≥ 1").clone();
    let report = RegretReport {
        app: app.to_string(),
        feedback: params.feedback,
        horizon,
        seed: params.seed,
        gamma,
        benchmark: bench.label().to_string(),
        opt_sum: bench.opt_sum,
        cum_reward: last.cum_reward,
        cum_gamma_opt: last.cum_gamma_opt,
        gamma_regret: last.cum_gamma_regret,
        explored_rounds: rows.iter().filter(|r| r.explored_subproblem >= 0).count(),
        oracle_calls,
        max_saddle_value: stats.max_saddle_value,
        unconverged_solves: stats.unconverged_solves,
    };
    Ok(RunOutput { rows, report })
}

/// Builds the configured instance and adversary, then runs (without writing anything).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let params = RunParams::from_config(cfg);
    let (t, spec, app) = (cfg.horizon, &cfg.adversary, cfg.app_name());
    match &cfg.app {
        &AppConfig::MonotoneSm { n, k, universe, density } => {
            let instance = CardinalityInstance::new(n, k)?;
            let stream = generate_adversary(
                spec,
                t,
                |rng| Ok(CoverageFunction::random(n, universe, density, rng)),
                |f, _| Ok(f.permuted(&(0..n).rev().collect::<Vec<_>>())),
            )?;
            run_instance(&instance, &stream, &params, app)
        }
        &AppConfig::Ranking { n, model, users } => {
            let instance = RankingInstance::new(n)?;
            let draw = |rng: &mut SimRng| sample_user_population(model, n, users, rng).build();
            let stream = generate_adversary(spec, t, draw, |_, rng| draw(rng))?;
            run_instance(&instance, &stream, &params, app)
        }
        AppConfig::Reserves { n, grid_points, valuations_csv } => {
            let n = *n;
            let instance = ReserveInstance::new(n, PriceGrid::uniform(*grid_points)?)?;
            let rows = match valuations_csv {
                Some(path) => {
                    let rows = load_valuations_csv(path)?;
                    if rows.is_empty() || rows.iter().any(|r| r.values().len() != n) {
                        return Err(Error::Config(format!("{}: need rows of {n} valuations", path.display())));
                    }
                    Some(rows)
                }
                None => None,
            };
            let draw = |rng: &mut SimRng| match &rows {
                Some(rows) => Ok(rows[rng.gen_range(0..rows.len())].clone()),
                None => ValuationProfile::new((0..n).map(|_| rng.gen::<f64>()).collect()),
            };
            let stream = generate_adversary(spec, t, draw, |_, rng| draw(rng))?;
            run_instance(&instance, &stream, &params, app)
        }
        &AppConfig::Nsm { n, m, family } => {
            let instance = LatticeInstance::new(n, m)?;
            let draw = |rng: &mut SimRng| match family {
                NsmFamily::Quadratic => TableLattice::random_quadratic(n, m, rng),
                NsmFamily::CutPlusModular => TableLattice::random_cut_plus_modular(n, rng),
            };
            let stream = generate_adversary(spec, t, draw, |_, rng| draw(rng))?;
            run_instance(&instance, &stream, &params, app)
        }
    }
}

pub fn write_run_csv(path: &Path, rows: &[RunRow]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_run_csv(path: &Path) -> Result<Vec<RunRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Runs the configured experiment and writes its record to the configured output path.
pub fn execute(cfg: &ExperimentConfig) -> Result<(RunOutput, std::path::PathBuf)> {
    let out = run_experiment(cfg)?;
    let path = cfg.output_path();
    write_run_csv(&path, &out.rows)?;
    Ok((out, path))
}

/// Sanity identity of a record: each row's regret equals `cum_gamma_opt − cum_reward`, and the
/// cumulative columns are running sums.
pub fn check_row_identities(rows: &[RunRow], tol: f64) -> bool {
    let mut cum = 0.0;
    rows.iter().enumerate().all(|(k, r)| {
        cum += r.reward;
        r.t == k + 1
            && (r.cum_reward - cum).abs() <= tol
            && (r.cum_gamma_regret - (r.cum_gamma_opt - r.cum_reward)).abs() <= tol
    })
}

