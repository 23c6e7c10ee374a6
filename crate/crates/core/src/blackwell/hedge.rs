//! Multiplicative weights, a cross-check learner for pure-form payoffs.

use crate::framework::ActionDistribution;

/// Exponential-weights learner over `m` actions with rate `√(8 ln m / T)`.
#[derive(Clone, Debug)]
pub struct HedgeLearner {
    eta: f64,
    cum_gain: Vec<f64>,
    theta: ActionDistribution,
}

impl HedgeLearner {
    pub fn new(m: usize, horizon: usize) -> Self {
        let eta = (8.0 * (m.max(2) as f64).ln() / horizon.max(1) as f64).sqrt();
        Self { eta, cum_gain: vec![0.0; m], theta: ActionDistribution::uniform(m) }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn theta(&self) -> &ActionDistribution {
        &self.theta
    }

    /// Adds a reward vector and refreshes the weights.
    pub fn observe_rewards(&mut self, rewards: &[f64]) -> &ActionDistribution {
        for (g, r) in self.cum_gain.iter_mut().zip(rewards) {
            *g += r;
        }
        let top = self.cum_gain.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> =
            self.cum_gain.iter().map(|g| (self.eta * (g - top)).exp()).collect();
        let total: f64 = weights.iter().sum();
        self.theta = ActionDistribution::new(weights.iter().map(|w| w / total).collect())
            .expect("exponential weights form a distribution");
        &self.theta
    }

    /// Pure-form payoff `p = θᵀy·1 − y` differs from `−y` by a constant shift, to which
    /// exponential weights are invariant, so `−p` serves as the reward vector.
    pub fn observe_payoff(&mut self, payoff: &[f64]) -> &ActionDistribution {
        let rewards: Vec<f64> = payoff.iter().map(|p| -p).collect();
        self.observe_rewards(&rewards)
    }
}

/// One multiplicative-weights update; returns the next distribution.
pub fn hedge_step(state: &mut HedgeLearner, rewards: &[f64]) -> ActionDistribution {
    state.observe_rewards(rewards).clone()
}
