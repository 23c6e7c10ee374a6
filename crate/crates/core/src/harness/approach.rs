//! Orthant approachability with the pure-form payoff `p_j(θ, y) = θᵀy − y_j`, `y ∈ [0,1]^d`,
//! under full-information and bandit feedback.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bandit::BanditLearner;
use crate::blackwell::{BlackwellLearner, Responder};
use crate::error::Result;
use crate::framework::{payoff_nonneg_slack as orthant_distance, pure_payoff, split_rng, ActionDistribution, SimRng};

/// `D_p` of the pure-form payoff.
pub const PURE_DIAMETER: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproachAdversary {
    /// `y ∼ U[0,1]^d` independently each round.
    Iid,
    /// `y = e_j` for the least-played coordinate `j` of the current action, which maximises
    /// this round's shortfall.
    AdaptiveShortfall,
}

impl ApproachAdversary {
    fn pick(self, theta: &ActionDistribution, rng: &mut SimRng) -> Vec<f64> {
        let d = theta.len();
        match self {
            ApproachAdversary::Iid => (0..d).map(|_| rng.gen::<f64>()).collect(),
            ApproachAdversary::AdaptiveShortfall => {
                let mut y = vec![0.0; d];
                let p = theta.probs();
                let j = (1..d).fold(0, |b, j| if p[j] < p[b] { j } else { b });
                y[j] = 1.0;
                y
            }
        }
    }
}

/// Outcome of a bandit approachability run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BanditApproach {
    /// Distance of the average payoff over all rounds (exploration rounds contribute zero).
    pub distance: f64,
    pub explored: usize,
    /// `distance + D_p · explored / T`.
    pub combined: f64,
}

/// Distance of the average payoff after `horizon` full-information rounds.
pub fn full_info_approach(d: usize, horizon: usize, adversary: ApproachAdversary, seed: u64) -> Result<f64> {
    let mut learner = BlackwellLearner::new(d, PURE_DIAMETER, Some(horizon), Responder::Proportional);
    let mut rng = split_rng(seed, 11);
    let mut sum = vec![0.0; d];
    for _ in 0..horizon {
        let theta = learner.theta().clone();
        let y = adversary.pick(&theta, &mut rng);
        let p = pure_payoff(&theta, &y);
        for (s, x) in sum.iter_mut().zip(&p) {
            *s += x;
        }
        learner.observe(&p)?;
    }
    Ok(orthant_distance(&scaled(&sum, horizon)))
}

/// Bandit approachability: an exploring round reveals the single entry `y_j` of a uniform `j`,
/// fed back as `p̂ = d·y_j·(θ_j·1 − e_j)`, and is charged `D_p`.
pub fn bandit_approach(d: usize, horizon: usize, adversary: ApproachAdversary, seed: u64) -> Result<BanditApproach> {
    let mut learner = BanditLearner::new(
        d,
        PURE_DIAMETER,
        2.0 * d as f64,
        horizon,
        Responder::Proportional,
        split_rng(seed, 12),
    );
    let mut rng = split_rng(seed, 11);
    let mut sum = vec![0.0; d];
    let mut explored = 0;
    for _ in 0..horizon {
        let (theta, explore) = learner.begin_round();
        let y = adversary.pick(&theta, &mut rng);
        if explore {
            let j = rng.gen_range(0..d);
            let tj = theta.probs()[j];
            let phat: Vec<f64> =
                (0..d).map(|l| d as f64 * y[j] * (tj - if l == j { 1.0 } else { 0.0 })).collect();
            learner.feed(&phat)?;
            explored += 1;
        } else {
            for (s, x) in sum.iter_mut().zip(pure_payoff(&theta, &y)) {
                *s += x;
            }
        }
    }
    let distance = orthant_distance(&scaled(&sum, horizon));
    let combined = distance + PURE_DIAMETER * explored as f64 / horizon as f64;
    Ok(BanditApproach { distance, explored, combined })
}

fn scaled(sum: &[f64], horizon: usize) -> Vec<f64> {
    sum.iter().map(|s| s / horizon as f64).collect()
}
