//! Online transformations of an offline iterative greedy: one Blackwell learner per
//! subproblem, chained through the local updates, with full-information or bandit feedback.

use rand::Rng;

use crate::bandit::BanditLearner;
use crate::blackwell::{BlackwellLearner, FullInfoLearner, HedgeLearner, LearnerStats};
use crate::error::{Error, Result};
use crate::framework::{eval, split_rng, ActionDistribution, GreedyInstance, Objective, SimRng};

/// What happened in one round.
#[derive(Clone, Debug)]
pub struct RoundTrace<P> {
    pub point: P,
    /// `f_t` at the played point.
    pub reward: f64,
    /// Subproblem that explored this round, if any.
    pub explored: Option<usize>,
    /// Actions of the subproblems that were reached.
    pub thetas: Vec<ActionDistribution>,
}

/// Full-information learner family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    #[default]
    Blackwell,
    /// Exponential weights; only for pure-form payoffs.
    Hedge,
}

/// Full-information online iterative greedy.
pub struct OnlineIg<'a, I: GreedyInstance> {
    instance: &'a I,
    learners: Vec<FullInfoLearner>,
    round: usize,
}

impl<'a, I: GreedyInstance> OnlineIg<'a, I> {
    /// `horizon = None` gives anytime learning rates.
    pub fn new(instance: &'a I, horizon: Option<usize>, kind: LearnerKind) -> Result<Self> {
        let d = instance.payoff_dim();
        let learners = (0..instance.num_subproblems())
            .map(|_| match kind {
                LearnerKind::Blackwell => Ok(FullInfoLearner::Blackwell(BlackwellLearner::new(
                    d,
                    instance.payoff_diameter(),
                    horizon,
                    instance.responder(),
                ))),
                LearnerKind::Hedge => {
                    if instance.responder() != crate::blackwell::Responder::Proportional {
                        return Err(Error::Config("hedge learners need pure-form payoffs".into()));
                    }
                    Ok(FullInfoLearner::Hedge(HedgeLearner::new(d, horizon.unwrap_or(1 << 16))))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { instance, learners, round: 0 })
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn learners(&self) -> &[FullInfoLearner] {
        &self.learners
    }

    pub fn stats(&self) -> LearnerStats {
        merge_stats(self.learners.iter().map(|l| l.stats()))
    }

    /// Plays one round against `f`, then feeds every learner its payoff at its own prefix point.
    pub fn play_round(
        &mut self,
        f: &dyn Objective<I::Point>,
        rng: &mut SimRng,
    ) -> Result<RoundTrace<I::Point>> {
        let n = self.instance.num_subproblems();
        let mut z = self.instance.initial_point();
        let mut prefixes = Vec::with_capacity(n);
        let mut thetas = Vec::with_capacity(n);
        for (i, learner) in self.learners.iter().enumerate() {
            let theta = learner.theta().clone();
            let next = self.instance.local_update(i, &theta, &z, rng);
            prefixes.push(std::mem::replace(&mut z, next));
            thetas.push(theta);
        }
        let point = self.instance.finalize(&z, rng);
        let reward = eval(f, &point);
        for (i, learner) in self.learners.iter_mut().enumerate() {
            let payoff = self.instance.payoff(i, &thetas[i], &prefixes[i], f);
            learner.observe(&payoff)?;
        }
        self.round += 1;
        Ok(RoundTrace { point, reward, explored: None, thetas })
    }
}

/// How the bandit value oracle reports `f_t(z_t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BanditSignal {
    /// The exact value.
    #[default]
    Exact,
    /// A Bernoulli draw with mean `f_t(z_t)` (e.g. a click).
    Bernoulli,
}

/// Single-use value oracle: a second query in the same round is a contract violation.
pub struct ValueOracle<'f, P> {
    f: &'f dyn Objective<P>,
    signal: BanditSignal,
    calls: usize,
}

impl<'f, P> ValueOracle<'f, P> {
    pub fn new(f: &'f dyn Objective<P>, signal: BanditSignal) -> Self {
        Self { f, signal, calls: 0 }
    }

    pub fn calls(&self) -> usize {
        self.calls
    }

    pub fn query(&mut self, z: &P, rng: &mut SimRng) -> Result<f64> {
        self.calls += 1;
        if self.calls > 1 {
            return Err(Error::BanditContractViolation { calls: self.calls });
        }
        let v = eval(self.f, z);
        Ok(match self.signal {
            BanditSignal::Exact => v,
            BanditSignal::Bernoulli => {
                if rng.gen::<f64>() < v {
                    1.0
                } else {
                    0.0
                }
            }
        })
    }
}

/// Bandit online iterative greedy.
pub struct BanditIg<'a, I: GreedyInstance> {
    instance: &'a I,
    learners: Vec<BanditLearner>,
    signal: BanditSignal,
    round: usize,
    oracle_calls: usize,
}

impl<'a, I: GreedyInstance> BanditIg<'a, I> {
    /// `horizon = None` wraps every learner in the doubling trick. Exploration coins are drawn
    /// from streams split off `seed`.
    pub fn new(instance: &'a I, horizon: Option<usize>, signal: BanditSignal, seed: u64) -> Self {
        let d = instance.payoff_dim();
        let learners = (0..instance.num_subproblems())
            .map(|i| {
                let rng = split_rng(seed, 1_000 + i as u64);
                match horizon {
                    Some(t) => BanditLearner::new(
                        d,
                        instance.payoff_diameter(),
                        instance.estimator_diameter(),
                        t,
                        instance.responder(),
                        rng,
                    ),
                    None => BanditLearner::doubling(
                        d,
                        instance.payoff_diameter(),
                        instance.estimator_diameter(),
                        instance.responder(),
                        rng,
                    ),
                }
            })
            .collect();
        Self { instance, learners, signal, round: 0, oracle_calls: 0 }
    }

    /// Overrides every learner's exploration probability.
    pub fn with_exploration(mut self, q: f64) -> Self {
        self.learners = self.learners.into_iter().map(|l| l.with_exploration(q)).collect();
        self
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn learners(&self) -> &[BanditLearner] {
        &self.learners
    }

    pub fn oracle_calls(&self) -> usize {
        self.oracle_calls
    }

    pub fn stats(&self) -> LearnerStats {
        merge_stats(self.learners.iter().map(|l| l.stats()))
    }

    /// Plays one round with a single evaluation of `f`. The first exploring subproblem probes,
    /// receives `f(z_exp)·w_exp`, and ends the round; otherwise the chained point is played and
    /// its observed value is discarded.
    pub fn play_round(
        &mut self,
        f: &dyn Objective<I::Point>,
        rng: &mut SimRng,
    ) -> Result<RoundTrace<I::Point>> {
        let mut oracle = ValueOracle::new(f, self.signal);
        let mut z = self.instance.initial_point();
        let mut thetas = Vec::new();
        let mut outcome = None;
        for i in 0..self.learners.len() {
            let (theta, explore) = self.learners[i].begin_round();
            if explore {
                let probe = self.instance.explore(i, &theta, &z, rng);
                let observed = oracle.query(&probe.z, rng)?;
                let phat: Vec<f64> = probe.w.iter().map(|w| observed * w).collect();
                self.learners[i].feed(&phat)?;
                thetas.push(theta);
                outcome = Some((probe.z, Some(i)));
                break;
            }
            z = self.instance.local_update(i, &theta, &z, rng);
            thetas.push(theta);
        }
        let (point, explored) = match outcome {
            Some(o) => o,
            None => {
                let point = self.instance.finalize(&z, rng);
                oracle.query(&point, rng)?;
                (point, None)
            }
        };
        self.oracle_calls += oracle.calls();
        self.round += 1;
        let reward = eval(f, &point);
        Ok(RoundTrace { point, reward, explored, thetas })
    }
}

fn merge_stats(stats: impl Iterator<Item = LearnerStats>) -> LearnerStats {
    stats.fold(LearnerStats::default(), |acc, s| LearnerStats {
        solves: acc.solves + s.solves,
        unconverged_solves: acc.unconverged_solves + s.unconverged_solves,
        max_saddle_value: acc.max_saddle_value.max(s.max_saddle_value),
    })
}
