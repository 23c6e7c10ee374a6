//! Full-information Blackwell approachability to the nonnegative orthant.
//!
//! The approachability game is reduced to online linear optimisation over
//! `K = {w ≤ 0, ‖w‖₂ ≤ 1}` with losses `−p_t`; FTRL produces `w_t`, and a halfspace
//! oracle turns `w_t` into the player's action.

pub mod hedge;
pub mod olo;
pub mod responder;

pub use hedge::{hedge_step, HedgeLearner};
pub use olo::{ftrl_argmin, learning_rate, ln_dim, project_k, q_exponent, FtrlSolution};
pub use responder::{proportional_response, saddle_response, Responder, Response, SADDLE_TOL};

use crate::error::{Error, Result};
use crate::framework::ActionDistribution;

/// Counters accumulated by a learner.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LearnerStats {
    pub solves: usize,
    pub unconverged_solves: usize,
    /// Largest certified saddle value seen.
    pub max_saddle_value: f64,
}

/// Blackwell learner: FTRL state plus halfspace responder.
#[derive(Clone, Debug)]
pub struct BlackwellLearner {
    payoff_diameter: f64,
    horizon: Option<usize>,
    q: f64,
    cum_loss: Vec<f64>,
    rounds: usize,
    w: Vec<f64>,
    theta: ActionDistribution,
    responder: Responder,
    stats: LearnerStats,
}

impl BlackwellLearner {
    /// `horizon = None` selects the anytime rate `√(2μ)/(D_p √t)`.
    pub fn new(d: usize, payoff_diameter: f64, horizon: Option<usize>, responder: Responder) -> Self {
        assert!(d >= 1 && payoff_diameter > 0.0);
        Self {
            payoff_diameter,
            horizon,
            q: q_exponent(d),
            cum_loss: vec![0.0; d],
            rounds: 0,
            w: vec![0.0; d],
            theta: ActionDistribution::uniform(d),
            responder,
            stats: LearnerStats::default(),
        }
    }

    pub fn dim(&self) -> usize {
        self.cum_loss.len()
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn q_exponent(&self) -> f64 {
        self.q
    }

    /// Learning rate used for the next solve.
    pub fn eta(&self) -> f64 {
        let t = self.horizon.unwrap_or(self.rounds.max(1));
        learning_rate(self.dim(), self.payoff_diameter, t)
    }

    pub fn cum_loss(&self) -> &[f64] {
        &self.cum_loss
    }

    /// Current OLO iterate, a point of `K`.
    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn theta(&self) -> &ActionDistribution {
        &self.theta
    }

    pub fn stats(&self) -> &LearnerStats {
        &self.stats
    }

    /// Feeds the realised payoff, re-solves FTRL and queries the responder.
    pub fn observe(&mut self, payoff: &[f64]) -> Result<&ActionDistribution> {
        if payoff.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: payoff.len() });
        }
        for (l, p) in self.cum_loss.iter_mut().zip(payoff) {
            *l -= p;
        }
        self.rounds += 1;
        let sol = ftrl_argmin(&self.cum_loss, self.eta(), self.q, Some(&self.w));
        self.stats.solves += 1;
        if !sol.converged {
            self.stats.unconverged_solves += 1;
        }
        self.w = sol.w;
        let response = self.responder.respond(&self.w)?;
        self.stats.max_saddle_value = self.stats.max_saddle_value.max(response.value);
        self.theta = response.theta;
        Ok(&self.theta)
    }
}

/// One learner step: absorbs the payoff of the previous round (if any) and returns the action.
pub fn algb_step(state: &mut BlackwellLearner, payoff: Option<&[f64]>) -> Result<ActionDistribution> {
    match payoff {
        Some(p) => state.observe(p).cloned(),
        None => Ok(state.theta().clone()),
    }
}

/// Full-information learner used by the online transformation.
#[derive(Clone, Debug)]
pub enum FullInfoLearner {
    Blackwell(BlackwellLearner),
    /// Only valid for pure-form payoffs.
    Hedge(HedgeLearner),
}

impl FullInfoLearner {
    pub fn theta(&self) -> &ActionDistribution {
        match self {
            FullInfoLearner::Blackwell(l) => l.theta(),
            FullInfoLearner::Hedge(l) => l.theta(),
        }
    }

    pub fn observe(&mut self, payoff: &[f64]) -> Result<()> {
        match self {
            FullInfoLearner::Blackwell(l) => l.observe(payoff).map(|_| ()),
            FullInfoLearner::Hedge(l) => {
                l.observe_payoff(payoff);
                Ok(())
            }
        }
    }

    pub fn stats(&self) -> LearnerStats {
        match self {
            FullInfoLearner::Blackwell(l) => l.stats().clone(),
            FullInfoLearner::Hedge(_) => LearnerStats::default(),
        }
    }
}
