//! Online iterative greedy via Blackwell approachability.
//!
//! An offline iterative-greedy γ-approximation is described as a [`GreedyInstance`]: a chain
//! of subproblems, each choosing a distribution `θ` whose vector payoff must be nonnegative.
//! [`OnlineIg`] and [`BanditIg`] run one Blackwell learner per subproblem to obtain
//! no-γ-regret online algorithms with full-information or bandit feedback. Four applications
//! live in [`apps`]; [`harness`] measures γ-regret against brute-force benchmarks.

pub mod apps;
pub mod bandit;
pub mod blackwell;
pub mod error;
pub mod framework;
pub mod harness;
pub mod transform;

pub use bandit::{tune_q, BanditLearner};
pub use blackwell::{BlackwellLearner, FullInfoLearner, HedgeLearner, LearnerStats, Responder};
pub use error::{Error, Result};
pub use framework::{
    exact_chain_expectation, offline_greedy, offline_ig_run, split_rng, validate_distribution,
    ActionDistribution, ExplorationSample, FeasiblePoint, GreedyInstance, MeanObjective, Objective,
    SharedObjective, SimRng,
};
pub use transform::{BanditIg, BanditSignal, LearnerKind, OnlineIg, RoundTrace};
