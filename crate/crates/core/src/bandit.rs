//! Bandit Blackwell learner: a full-information learner that only sees scaled payoff
//! estimates on coin-flip exploration rounds, with an optional doubling-trick wrapper.

use rand::Rng;

use crate::blackwell::{ln_dim, BlackwellLearner, LearnerStats, Responder};
use crate::error::{Error, Result};
use crate::framework::{ActionDistribution, SimRng};

/// Exploration probability `D_p^{−2/3} D̂^{2/3} (ln d)^{1/3} T^{−1/3}`, clamped to `[1/T, 1]`.
pub fn tune_q(payoff_diameter: f64, estimator_diameter: f64, d: usize, horizon: usize) -> f64 {
    let t = horizon.max(1) as f64;
    let raw = payoff_diameter.powf(-2.0 / 3.0)
        * estimator_diameter.powf(2.0 / 3.0)
        * ln_dim(d).cbrt()
        * t.powf(-1.0 / 3.0);
    raw.clamp(1.0 / t, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Schedule {
    Known { horizon: usize },
    Doubling { epoch_start: usize, epoch_len: usize },
}

/// Per-subproblem bandit learner.
#[derive(Clone, Debug)]
pub struct BanditLearner {
    d: usize,
    payoff_diameter: f64,
    estimator_diameter: f64,
    responder: Responder,
    schedule: Schedule,
    q_override: Option<f64>,
    q: f64,
    inner: BlackwellLearner,
    rng: SimRng,
    pending_explore: Option<bool>,
    rounds: usize,
    explored: usize,
    restarts: Vec<usize>,
    past_stats: LearnerStats,
}

impl BanditLearner {
    /// Known-horizon learner.
    pub fn new(
        d: usize,
        payoff_diameter: f64,
        estimator_diameter: f64,
        horizon: usize,
        responder: Responder,
        rng: SimRng,
    ) -> Self {
        Self::build(d, payoff_diameter, estimator_diameter, Schedule::Known { horizon }, responder, rng)
    }

    /// Anytime learner restarting at horizon guesses 1, 2, 4, ….
    pub fn doubling(
        d: usize,
        payoff_diameter: f64,
        estimator_diameter: f64,
        responder: Responder,
        rng: SimRng,
    ) -> Self {
        let schedule = Schedule::Doubling { epoch_start: 0, epoch_len: 1 };
        Self::build(d, payoff_diameter, estimator_diameter, schedule, responder, rng)
    }

    fn build(
        d: usize,
        payoff_diameter: f64,
        estimator_diameter: f64,
        schedule: Schedule,
        responder: Responder,
        rng: SimRng,
    ) -> Self {
        let mut learner = Self {
            d,
            payoff_diameter,
            estimator_diameter,
            responder,
            schedule,
            q_override: None,
            q: 1.0,
            inner: BlackwellLearner::new(d, payoff_diameter, Some(1), responder),
            rng,
            pending_explore: None,
            rounds: 0,
            explored: 0,
            restarts: vec![1],
            past_stats: LearnerStats::default(),
        };
        learner.reset_inner();
        learner
    }

    /// Fixes the exploration probability (0 disables exploration).
    pub fn with_exploration(mut self, q: f64) -> Self {
        assert!((0.0..=1.0).contains(&q), "exploration probability {q} outside [0,1]");
        self.q_override = Some(q);
        self.reset_inner();
        self
    }

    fn epoch_horizon(&self) -> usize {
        match self.schedule {
            Schedule::Known { horizon } => horizon,
            Schedule::Doubling { epoch_len, .. } => epoch_len,
        }
    }

    fn reset_inner(&mut self) {
        let t = self.epoch_horizon();
        self.q = self.q_override.unwrap_or_else(|| {
            tune_q(self.payoff_diameter, self.estimator_diameter, self.d, t)
        });
        // The inner learner sees about qT estimates of magnitude at most D̂/q.
        let q = self.q.max(1.0 / t.max(1) as f64);
        let inner_horizon = ((q * t as f64).ceil() as usize).max(1);
        let stats = self.inner.stats();
        self.past_stats.solves += stats.solves;
        self.past_stats.unconverged_solves += stats.unconverged_solves;
        self.past_stats.max_saddle_value = self.past_stats.max_saddle_value.max(stats.max_saddle_value);
        self.inner = BlackwellLearner::new(
            self.d,
            self.estimator_diameter / q,
            Some(inner_horizon),
            self.responder,
        );
    }

    pub fn exploration_probability(&self) -> f64 {
        self.q
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn explored_count(&self) -> usize {
        self.explored
    }

    /// 1-based rounds at which a fresh inner learner started.
    pub fn restarts(&self) -> &[usize] {
        &self.restarts
    }

    pub fn theta(&self) -> &ActionDistribution {
        self.inner.theta()
    }

    pub fn inner(&self) -> &BlackwellLearner {
        &self.inner
    }

    pub fn stats(&self) -> LearnerStats {
        let s = self.inner.stats();
        LearnerStats {
            solves: self.past_stats.solves + s.solves,
            unconverged_solves: self.past_stats.unconverged_solves + s.unconverged_solves,
            max_saddle_value: self.past_stats.max_saddle_value.max(s.max_saddle_value),
        }
    }

    /// Starts a round: returns the action to play and whether this round explores.
    pub fn begin_round(&mut self) -> (ActionDistribution, bool) {
        if let Schedule::Doubling { epoch_start, epoch_len } = self.schedule {
            if self.rounds == epoch_start + epoch_len {
                self.schedule = Schedule::Doubling { epoch_start: self.rounds, epoch_len: 2 * epoch_len };
                self.restarts.push(self.rounds + 1);
                self.reset_inner();
            }
        }
        self.rounds += 1;
        let explore = self.q > 0.0 && self.rng.gen::<f64>() < self.q;
        if explore {
            self.explored += 1;
        }
        self.pending_explore = Some(explore);
        (self.inner.theta().clone(), explore)
    }

    /// Feeds an exploration estimate `p̂`; the inner learner receives `p̂/q`.
    pub fn feed(&mut self, phat: &[f64]) -> Result<()> {
        if self.pending_explore != Some(true) {
            return Err(Error::FeedWithoutExplore);
        }
        self.pending_explore = None;
        let scaled: Vec<f64> = phat.iter().map(|p| p / self.q).collect();
        self.inner.observe(&scaled)?;
        Ok(())
    }
}
