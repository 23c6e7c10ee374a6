//! Experiment configuration (JSON).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::apps::ranking::PopulationKind;
use crate::error::{Error, Result};
use crate::transform::{BanditSignal, LearnerKind};

/// Environment variable naming the default output directory for run records.
pub const OUT_DIR_ENV: &str = "BLACKGREEDY_OUT_DIR";

/// Application and its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum AppConfig {
    /// Weighted coverage over `n` elements, cardinality `k`.
    MonotoneSm {
        n: usize,
        k: usize,
        #[serde(default = "default_universe")]
        universe: usize,
        #[serde(default = "default_density")]
        density: f64,
    },
    /// Sequential submodular ranking of `n` items.
    Ranking {
        n: usize,
        #[serde(default = "default_population")]
        model: PopulationKind,
        #[serde(default = "default_users")]
        users: usize,
    },
    /// `n` bidders, `grid_points` equally spaced reserve prices in `[0, 1]`.
    Reserves {
        n: usize,
        grid_points: usize,
        #[serde(default)]
        valuations_csv: Option<PathBuf>,
    },
    /// Lattice `{0..m}^n`.
    Nsm {
        n: usize,
        m: usize,
        #[serde(default)]
        family: NsmFamily,
    },
}

fn default_universe() -> usize {
    16
}

fn default_density() -> f64 {
    0.3
}

fn default_population() -> PopulationKind {
    PopulationKind::Ferreira
}

fn default_users() -> usize {
    8
}

/// Random lattice-submodular family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NsmFamily {
    /// Unary terms minus nonnegative pairwise products of increasing functions.
    #[default]
    Quadratic,
    /// Graph cut plus a signed modular term; needs `m = 2`.
    CutPlusModular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackMode {
    #[default]
    Full,
    Bandit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryKind {
    /// A fresh random function every round.
    Iid,
    /// Two fixed functions in turn.
    Alternating,
    /// One function for the first half of the horizon, a different one afterwards.
    PhaseShift,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversarySpec {
    pub kind: AdversaryKind,
    /// Seed of the function stream, independent of the learner's seed.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkMode {
    /// Exact best fixed point by enumeration.
    #[default]
    BruteForce,
    /// Offline greedy on the summed objective: a lower bound on the optimum.
    OfflineProxy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub app: AppConfig,
    #[serde(default)]
    pub feedback: FeedbackMode,
    #[serde(default)]
    pub bandit_signal: BanditSignal,
    #[serde(default)]
    pub learner: LearnerKind,
    /// Anytime learners (doubling trick for bandit feedback) instead of horizon-tuned ones.
    #[serde(default)]
    pub doubling: bool,
    pub horizon: usize,
    #[serde(default)]
    pub seed: u64,
    pub adversary: AdversarySpec,
    #[serde(default)]
    pub benchmark: BenchmarkMode,
    /// CSV path of the run record; defaults to a file in `$BLACKGREEDY_OUT_DIR` or `.`.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.horizon == 0 {
            return bad("horizon must be ≥ 1".into());
        }
        if self.learner == LearnerKind::Hedge && self.feedback == FeedbackMode::Bandit {
            return bad("hedge learners are full-information only".into());
        }
        match &self.app {
            AppConfig::MonotoneSm { n, k, universe, density } => {
                if *n == 0 || *n > 64 || *k == 0 || k > n {
                    return bad(format!("monotone_sm needs 1 ≤ k ≤ n ≤ 64, got n={n}, k={k}"));
                }
                if *universe == 0 || *universe > 64 || !(0.0..=1.0).contains(density) {
                    return bad("monotone_sm universe must be in 1..=64 and density in [0,1]".into());
                }
            }
            AppConfig::Ranking { n, users, .. } => {
                if *n == 0 || *n > 64 || *users == 0 {
                    return bad(format!("ranking needs 1 ≤ n ≤ 64 and users ≥ 1, got n={n}"));
                }
            }
            AppConfig::Reserves { n, grid_points, .. } => {
                if *n == 0 || *grid_points < 2 {
                    return bad("reserves needs n ≥ 1 and grid_points ≥ 2".into());
                }
            }
            AppConfig::Nsm { n, m, family } => {
                if *n == 0 || *m == 0 {
                    return bad("nsm needs n ≥ 1 and m ≥ 1".into());
                }
                if *family == NsmFamily::CutPlusModular && *m != 2 {
                    return bad("cut_plus_modular needs m = 2".into());
                }
            }
        }
        Ok(())
    }

    pub fn app_name(&self) -> &'static str {
        match self.app {
            AppConfig::MonotoneSm { .. } => "monotone_sm",
            AppConfig::Ranking { .. } => "ranking",
            AppConfig::Reserves { .. } => "reserves",
            AppConfig::Nsm { .. } => "nsm",
        }
    }

    /// Where the run record goes.
    pub fn output_path(&self) -> PathBuf {
        if let Some(p) = &self.output {
            return p.clone();
        }
        let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
        dir.join(format!("run_{}_T{}_s{}.csv", self.app_name(), self.horizon, self.seed))
    }
}
