//! Horizon sweeps over seeds and their aggregation.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::runner::{read_run_csv, run_experiment, write_run_csv, RegretReport};
use super::slope::{fit_slope, mean_stderr};
use crate::error::{Error, Result};

/// Parses `2^a..2^b` (every power of two in between), `x..y` in powers of two likewise when both
/// ends are powers of two, or a comma-separated list of integers / `2^k` terms.
pub fn parse_horizons(spec: &str) -> Result<Vec<usize>> {
    let term = |s: &str| -> Result<usize> {
        let s = s.trim();
        let bad = || Error::Config(format!("bad horizon {s:?}"));
        let v = match s.split_once('^') {
            Some((b, e)) => {
                let b: usize = b.trim().parse().map_err(|_| bad())?;
                let e: u32 = e.trim().parse().map_err(|_| bad())?;
                b.checked_pow(e).ok_or_else(bad)?
            }
            None => s.parse().map_err(|_| bad())?,
        };
        if v == 0 {
            return Err(bad());
        }
        Ok(v)
    };
    if let Some((lo, hi)) = spec.split_once("..") {
        let (lo, hi) = (term(lo)?, term(hi)?);
        if !lo.is_power_of_two() || !hi.is_power_of_two() || lo > hi {
            return Err(Error::Config(format!("horizon range {spec:?} must span powers of two")));
        }
        return Ok((lo.trailing_zeros()..=hi.trailing_zeros()).map(|e| 1usize << e).collect());
    }
    spec.split(',').map(term).collect()
}

/// Runs `cfg` for every (horizon, seed) pair in parallel and writes one CSV per run into
/// `out_dir`. Seeds are `cfg.seed, cfg.seed + 1, …`.
pub fn sweep(cfg: &ExperimentConfig, horizons: &[usize], seeds: usize, out_dir: &Path) -> Result<Vec<RegretReport>> {
    std::fs::create_dir_all(out_dir)?;
    let jobs: Vec<(usize, u64)> =
        horizons.iter().flat_map(|&t| (0..seeds as u64).map(move |s| (t, s))).collect();
    jobs.par_iter()
        .map(|&(t, s)| {
            let mut run_cfg = cfg.clone();
            run_cfg.horizon = t;
            run_cfg.seed = cfg.seed + s;
            let out = run_experiment(&run_cfg)?;
            write_run_csv(&run_file(out_dir, t, run_cfg.seed), &out.rows)?;
            Ok(out.report)
        })
        .collect()
}

pub fn run_file(dir: &Path, horizon: usize, seed: u64) -> PathBuf {
    dir.join(format!("run_T{horizon}_s{seed}.csv"))
}

/// Mean final γ-regret at one horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HorizonSummary {
    pub horizon: usize,
    pub runs: usize,
    pub mean_gamma_regret: f64,
    pub stderr: f64,
}

#[derive(Debug)]
pub struct SweepSummary {
    pub horizons: Vec<HorizonSummary>,
    /// Log-log slope of mean regret, when it can be fitted.
    pub slope: Result<f64>,
}

/// Groups final regrets by horizon.
pub fn summarize(finals: &[(usize, f64)]) -> SweepSummary {
    let mut groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for &(t, r) in finals {
        groups.entry(t).or_default().push(r);
    }
    let horizons: Vec<HorizonSummary> = groups
        .into_iter()
        .map(|(horizon, v)| {
            let (mean, se) = mean_stderr(&v);
            HorizonSummary { horizon, runs: v.len(), mean_gamma_regret: mean, stderr: se }
        })
        .collect();
    let pts: Vec<(f64, f64)> = horizons.iter().map(|h| (h.horizon as f64, h.mean_gamma_regret)).collect();
    SweepSummary { slope: fit_slope(&pts), horizons }
}

/// Reads every run CSV in `dir`, summarises final regrets per horizon, and writes the summary
/// table to `out`.
pub fn report_dir(dir: &Path, out: &Path) -> Result<SweepSummary> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv") && Some(p.as_path()) != Some(out))
        .collect();
    paths.sort();
    let mut finals = Vec::new();
    for p in &paths {
        let rows = read_run_csv(p)?;
        if let Some(last) = rows.last() {
            finals.push((last.t, last.cum_gamma_regret));
        }
    }
    if finals.is_empty() {
        return Err(Error::Config(format!("no run records in {}", dir.display())));
    }
    let summary = summarize(&finals);
    if let Some(parent) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let mut w = csv::Writer::from_path(out)?;
    for h in &summary.horizons {
        w.serialize(h)?;
    }
    w.flush()?;
    Ok(summary)
}
