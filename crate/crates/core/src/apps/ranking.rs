//! Sequential submodular maximisation for product ranking.
//!
//! A ranking fills `n` slots with items; the objective is `Σ_i λ_i f_i({π_1, …, π_i})`, where
//! `λ_i` is the share of users who inspect exactly the top `i` slots. Subproblem `i` fills slot `i`.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::coverage::{CoverageFunction, SetFunction};
use super::{encode_indices, product_space};
use crate::blackwell::Responder;
use crate::error::{Error, Result};
use crate::framework::{
    argmax, eval, pure_payoff, ActionDistribution, ExplorationSample, FeasiblePoint, GreedyInstance,
    Objective, SimRng,
};

/// Largest item count the brute-force benchmark enumerates.
pub const ENUMERATION_LIMIT_N: usize = 7;

/// Slot contents: 0 is an empty slot, `j + 1` shows item `j`. Duplicates are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ranking {
    pub slots: Vec<usize>,
}

impl Ranking {
    pub fn empty(n: usize) -> Self {
        Self { slots: vec![0; n] }
    }

    /// Copy with item `j` (0-based) in slot `i`.
    pub fn with_item(&self, i: usize, j: usize) -> Self {
        let mut slots = self.slots.clone();
        slots[i] = j + 1;
        Self { slots }
    }

    /// Bitmask of the items in the first `len` slots.
    pub fn prefix_mask(&self, len: usize) -> u64 {
        self.slots[..len].iter().filter(|&&s| s > 0).fold(0, |m, &s| m | (1 << (s - 1)))
    }
}

impl FeasiblePoint for Ranking {
    fn encode(&self) -> Vec<u8> {
        encode_indices(2, self.slots.iter().copied())
    }
}

/// `f(π) = Σ_i λ_i f_i({π_1..π_i})` with `Σλ ≤ 1` and every `f_i` monotone submodular.
#[derive(Clone)]
pub struct SequentialObjective {
    lambda: Vec<f64>,
    levels: Vec<Arc<dyn SetFunction>>,
    tag: String,
}

impl SequentialObjective {
    pub fn new(lambda: Vec<f64>, levels: Vec<Arc<dyn SetFunction>>, tag: String) -> Result<Self> {
        if lambda.len() != levels.len() || lambda.is_empty() {
            return Err(Error::BadParams("one patience weight per level required".into()));
        }
        if lambda.iter().any(|l| !l.is_finite() || *l < 0.0) || lambda.iter().sum::<f64>() > 1.0 + 1e-12 {
            return Err(Error::BadParams("patience weights must be nonnegative with sum ≤ 1".into()));
        }
        Ok(Self { lambda, levels, tag })
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn level(&self, i: usize) -> &dyn SetFunction {
        self.levels[i].as_ref()
    }
}

/// Objective value of a ranking; empty slots are ignored and duplicates collapse.
pub fn eval_ranking(obj: &SequentialObjective, pi: &Ranking) -> f64 {
    let mut mask = 0u64;
    let mut total = 0.0;
    for (i, (&lambda, f)) in obj.lambda.iter().zip(&obj.levels).enumerate() {
        if let Some(&s) = pi.slots.get(i) {
            if s > 0 {
                mask |= 1 << (s - 1);
            }
        }
        if lambda > 0.0 {
            total += lambda * f.eval_set(mask);
        }
    }
    total.min(1.0)
}

impl Objective<Ranking> for SequentialObjective {
    fn value(&self, z: &Ranking) -> f64 {
        eval_ranking(self, z)
    }

    fn tag(&self) -> String {
        self.tag.clone()
    }
}

/// One user of the window/click population: inspects the top `window` slots and clicks item
/// `j` independently with probability `click[j]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowUser {
    pub weight: f64,
    pub window: usize,
    pub click: Vec<f64>,
}

/// Click probability `κ_u(S) = 1 − Π_{j∈S}(1 − q_{u,j})`.
pub fn click_probability(click: &[f64], set: u64) -> f64 {
    let mut miss = 1.0;
    for (j, q) in click.iter().enumerate() {
        if set & (1 << j) != 0 {
            miss *= 1.0 - q;
        }
    }
    1.0 - miss
}

/// Weighted average of users' click probabilities.
#[derive(Clone, Debug)]
pub struct UserMixture {
    n: usize,
    users: Vec<(f64, Vec<f64>)>,
}

impl SetFunction for UserMixture {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn eval_set(&self, set: u64) -> f64 {
        self.users.iter().map(|(w, q)| w * click_probability(q, set)).sum::<f64>().min(1.0)
    }

    fn describe(&self) -> String {
        format!("{:?}", self.users)
    }
}

/// Serializable population description.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum PopulationModel {
    /// Arbitrary patience distribution and monotone submodular level functions.
    Asadpour { lambda: Vec<f64>, levels: Vec<CoverageFunction> },
    /// Users with an inspection window and independent per-item click probabilities.
    Ferreira { n: usize, users: Vec<WindowUser> },
}

/// Population family used by the generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PopulationKind {
    Asadpour,
    Ferreira,
}

impl PopulationModel {
    pub fn build(&self) -> Result<SequentialObjective> {
        let tag = serde_json::to_string(self)?;
        match self {
            PopulationModel::Asadpour { lambda, levels } => {
                let n = lambda.len();
                if levels.iter().any(|f| f.ground_size() != n) {
                    return Err(Error::BadParams("level functions must be over the n items".into()));
                }
                let levels = levels.iter().map(|f| Arc::new(f.clone()) as Arc<dyn SetFunction>).collect();
                SequentialObjective::new(lambda.clone(), levels, tag)
            }
            PopulationModel::Ferreira { n, users } => {
                let n = *n;
                if n == 0 || n > 64 {
                    return Err(Error::BadParams(format!("item count {n} not in 1..=64")));
                }
                let total: f64 = users.iter().map(|u| u.weight).sum();
                for u in users {
                    if u.click.len() != n || u.click.iter().any(|q| !(0.0..=1.0).contains(q)) {
                        return Err(Error::BadParams("click probabilities must lie in [0,1]".into()));
                    }
                    if u.window == 0 || u.window > n || !(u.weight >= 0.0) {
                        return Err(Error::BadParams("user window must be in 1..=n, weight ≥ 0".into()));
                    }
                }
                if total <= 0.0 {
                    return Err(Error::BadParams("population has zero total weight".into()));
                }
                let mut lambda = vec![0.0; n];
                let mut groups: Vec<Vec<(f64, Vec<f64>)>> = vec![Vec::new(); n];
                for u in users {
                    lambda[u.window - 1] += u.weight / total;
                    groups[u.window - 1].push((u.weight / total, u.click.clone()));
                }
                let levels = groups
                    .into_iter()
                    .zip(&lambda)
                    .map(|(g, &l)| {
                        let users = g.into_iter().map(|(w, q)| (if l > 0.0 { w / l } else { 0.0 }, q)).collect();
                        Arc::new(UserMixture { n, users }) as Arc<dyn SetFunction>
                    })
                    .collect();
                SequentialObjective::new(lambda, levels, tag)
            }
        }
    }
}

/// Random population over `n` items with `users` users (or levels for the coverage family).
pub fn sample_user_population(kind: PopulationKind, n: usize, users: usize, rng: &mut SimRng) -> PopulationModel {
    match kind {
        PopulationKind::Ferreira => PopulationModel::Ferreira {
            n,
            users: (0..users.max(1))
                .map(|_| WindowUser {
                    weight: 1.0 - rng.gen::<f64>(),
                    window: rng.gen_range(1..=n),
                    click: (0..n).map(|_| rng.gen::<f64>() * 0.6).collect(),
                })
                .collect(),
        },
        PopulationKind::Asadpour => {
            let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            PopulationModel::Asadpour {
                lambda: raw.iter().map(|r| r / total).collect(),
                levels: (0..n).map(|_| CoverageFunction::random(n, 2 * n + 2, 0.35, rng)).collect(),
            }
        }
    }
}

/// `n` items and `n` slots.
#[derive(Clone, Debug, PartialEq)]
pub struct RankingInstance {
    n: usize,
}

impl RankingInstance {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::BadParams(format!("item count {n} not in 1..=64")));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `y_j = f(π + j·e_i) − f(π)`.
    pub fn marginals(&self, i: usize, pi: &Ranking, f: &dyn Objective<Ranking>) -> Vec<f64> {
        let base = eval(f, pi);
        (0..self.n).map(|j| eval(f, &pi.with_item(i, j)) - base).collect()
    }

    fn probe(&self, i: usize, theta: &ActionDistribution, pi: &Ranking, j: usize) -> ExplorationSample<Ranking> {
        let n = self.n as f64;
        let tj = theta.probs()[j];
        let w = (0..self.n).map(|l| n * (tj - if l == j { 1.0 } else { 0.0 })).collect();
        ExplorationSample { w, z: pi.with_item(i, j) }
    }
}

impl GreedyInstance for RankingInstance {
    type Point = Ranking;

    fn num_subproblems(&self) -> usize {
        self.n
    }

    fn payoff_dim(&self) -> usize {
        self.n
    }

    fn gamma(&self) -> f64 {
        0.5
    }

    fn payoff_diameter(&self) -> f64 {
        2.0
    }

    fn estimator_diameter(&self) -> f64 {
        2.0 * self.n as f64
    }

    fn responder(&self) -> Responder {
        Responder::Proportional
    }

    fn initial_point(&self) -> Ranking {
        Ranking::empty(self.n)
    }

    fn is_feasible(&self, z: &Ranking) -> bool {
        z.slots.len() == self.n && z.slots.iter().all(|&s| s <= self.n)
    }

    fn payoff(&self, i: usize, theta: &ActionDistribution, z: &Ranking, f: &dyn Objective<Ranking>) -> Vec<f64> {
        pure_payoff(theta, &self.marginals(i, z, f))
    }

    fn local_update_support(&self, i: usize, theta: &ActionDistribution, z: &Ranking) -> Vec<(f64, Ranking)> {
        theta.probs().iter().enumerate().map(|(j, &p)| (p, z.with_item(i, j))).collect()
    }

    fn local_update(&self, i: usize, theta: &ActionDistribution, z: &Ranking, rng: &mut SimRng) -> Ranking {
        z.with_item(i, theta.sample(rng))
    }

    fn explore_support(&self, i: usize, theta: &ActionDistribution, z: &Ranking)
        -> Vec<(f64, ExplorationSample<Ranking>)> {
        let p = 1.0 / self.n as f64;
        (0..self.n).map(|j| (p, self.probe(i, theta, z, j))).collect()
    }

    fn explore(&self, i: usize, theta: &ActionDistribution, z: &Ranking, rng: &mut SimRng)
        -> ExplorationSample<Ranking> {
        self.probe(i, theta, z, rng.gen_range(0..self.n))
    }

    fn local_optimum(&self, i: usize, z: &Ranking, f: &dyn Objective<Ranking>) -> Result<ActionDistribution> {
        Ok(ActionDistribution::point_mass(self.n, argmax(&self.marginals(i, z, f))))
    }

    /// All `(n+1)^n` rankings up to six items. For seven items only the `n!` permutations are
    /// listed: with monotone levels, replacing an empty or repeated slot by an unused item never
    /// lowers the objective, so some permutation is optimal.
    fn feasible_points(&self) -> Result<Vec<Ranking>> {
        if self.n <= 6 {
            return Ok(product_space(self.n + 1, self.n, u128::MAX)?
                .into_iter()
                .map(|slots| Ranking { slots })
                .collect());
        }
        if self.n > ENUMERATION_LIMIT_N {
            let size = ((self.n + 1) as u128).checked_pow(self.n as u32).unwrap_or(u128::MAX);
            return Err(Error::TooLargeToEnumerate { size, limit: 5040 });
        }
        let mut out = Vec::new();
        let mut items: Vec<usize> = (1..=self.n).collect();
        permutations(&mut items, 0, &mut out);
        Ok(out.into_iter().map(|slots| Ranking { slots }).collect())
    }
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for j in k..items.len() {
        items.swap(k, j);
        permutations(items, k + 1, out);
        items.swap(k, j);
    }
}
