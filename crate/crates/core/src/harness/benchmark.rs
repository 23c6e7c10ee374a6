//! The comparator `max_z Σ_t f_t(z)` of γ-regret.

use super::adversary::dedupe;
use super::config::BenchmarkMode;
use crate::error::Result;
use crate::framework::{eval, offline_greedy, split_rng, GreedyInstance, MeanObjective, SharedObjective};

/// Best fixed point of a stream and its cumulative value.
#[derive(Clone, Debug)]
pub struct Benchmark<P> {
    pub point: P,
    pub opt_sum: f64,
    /// `f_t(z*)` for every round.
    pub per_round: Vec<f64>,
    pub mode: BenchmarkMode,
}

impl<P> Benchmark<P> {
    pub fn label(&self) -> &'static str {
        match self.mode {
            BenchmarkMode::BruteForce => "exact",
            BenchmarkMode::OfflineProxy => "proxy (lower bound on OPT)",
        }
    }
}

/// Exact argmax by enumeration (first point on ties), or in proxy mode the better of the
/// offline greedy's output and final chain point on the summed objective.
pub fn compute_benchmark<I: GreedyInstance>(
    instance: &I,
    stream: &[SharedObjective<I::Point>],
    mode: BenchmarkMode,
    seed: u64,
) -> Result<Benchmark<I::Point>> {
    let unique = dedupe(stream);
    let total = |z: &I::Point| unique.iter().map(|(f, c)| *c as f64 * eval(f.as_ref(), z)).sum::<f64>();
    let candidates = match mode {
        BenchmarkMode::BruteForce => instance.feasible_points()?,
        BenchmarkMode::OfflineProxy => {
            let t = stream.len() as f64;
            let mean = MeanObjective::new(unique.iter().map(|(f, c)| (f.clone(), *c as f64 / t)).collect());
            let run = offline_greedy(instance, &mean, &mut split_rng(seed, 3))?;
            let last = run.points.last().cloned().unwrap_or_else(|| instance.initial_point());
            vec![run.output, last]
        }
    };
    let mut best: Option<(f64, I::Point)> = None;
    for z in candidates {
        let v = total(&z);
        if best.as_ref().map_or(true, |(b, _)| v > *b) {
            best = Some((v, z));
        }
    }
    let (opt_sum, point) = best.expect("feasible region is nonempty");
    let per_round = stream.iter().map(|f| eval(f.as_ref(), &point)).collect();
    Ok(Benchmark { point, opt_sum, per_round, mode })
}
