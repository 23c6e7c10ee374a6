//! Monotone submodular maximisation under a cardinality constraint `|S| ≤ k`.
//!
//! Subproblem `i` adds one element drawn from `θ`; the payoff of `θ` against element `j`
//! is `θᵀy − y_j` with `y` the marginal gains at the current set.

use std::sync::Arc;

use rand::Rng;

use super::coverage::{CoverageFunction, SetFunction};
use super::{encode_indices, full_mask};
use crate::blackwell::Responder;
use crate::error::{Error, Result};
use crate::framework::{
    argmax, eval, pure_payoff, ActionDistribution, ExplorationSample, FeasiblePoint, GreedyInstance,
    Objective, SimRng,
};

/// Largest ground set the brute-force benchmark enumerates.
pub const ENUMERATION_LIMIT_N: usize = 12;

/// A subset of the ground set, as a bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct ElementSet(pub u64);

impl ElementSet {
    pub fn empty() -> Self {
        Self(0)
    }

    pub fn from_elements(elems: &[usize]) -> Self {
        Self(elems.iter().fold(0, |m, &j| m | (1 << j)))
    }

    pub fn with(self, j: usize) -> Self {
        Self(self.0 | (1 << j))
    }

    pub fn contains(self, j: usize) -> bool {
        self.0 & (1 << j) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn elements(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&j| self.0 & (1 << j) != 0)
    }
}

impl FeasiblePoint for ElementSet {
    fn encode(&self) -> Vec<u8> {
        encode_indices(1, self.elements())
    }
}

/// Any set function is an objective on element sets.
pub struct SetObjective(pub Arc<dyn SetFunction>);

impl Objective<ElementSet> for SetObjective {
    fn value(&self, z: &ElementSet) -> f64 {
        self.0.eval_set(z.0)
    }

    fn tag(&self) -> String {
        self.0.describe()
    }
}

impl Objective<ElementSet> for CoverageFunction {
    fn value(&self, z: &ElementSet) -> f64 {
        self.eval_set(z.0)
    }

    fn tag(&self) -> String {
        self.describe()
    }
}

/// Ground set size `n` and cardinality bound `k` (= number of subproblems).
#[derive(Clone, Debug, PartialEq)]
pub struct CardinalityInstance {
    n: usize,
    k: usize,
}

impl CardinalityInstance {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || n > 64 || k == 0 || k > n {
            return Err(Error::BadParams(format!("need 1 ≤ k ≤ n ≤ 64, got n={n}, k={k}")));
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Marginal gains `f(z ∪ {j}) − f(z)`.
    pub fn marginals(&self, z: &ElementSet, f: &dyn Objective<ElementSet>) -> Vec<f64> {
        let base = eval(f, z);
        (0..self.n).map(|j| eval(f, &z.with(j)) - base).collect()
    }
}

impl GreedyInstance for CardinalityInstance {
    type Point = ElementSet;

    fn num_subproblems(&self) -> usize {
        self.k
    }

    fn payoff_dim(&self) -> usize {
        self.n
    }

    fn gamma(&self) -> f64 {
        1.0 - (-1.0f64).exp()
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

    fn initial_point(&self) -> ElementSet {
        ElementSet::empty()
    }

    fn is_feasible(&self, z: &ElementSet) -> bool {
        z.0 & !full_mask(self.n) == 0 && z.len() <= self.k
    }

    fn payoff(
        &self,
        _i: usize,
        theta: &ActionDistribution,
        z: &ElementSet,
        f: &dyn Objective<ElementSet>,
    ) -> Vec<f64> {
        pure_payoff(theta, &self.marginals(z, f))
    }

    fn local_update_support(&self, _i: usize, theta: &ActionDistribution, z: &ElementSet)
        -> Vec<(f64, ElementSet)> {
        theta.probs().iter().enumerate().map(|(j, &p)| (p, z.with(j))).collect()
    }

    fn local_update(&self, _i: usize, theta: &ActionDistribution, z: &ElementSet, rng: &mut SimRng)
        -> ElementSet {
        z.with(theta.sample(rng))
    }

    fn explore_support(&self, _i: usize, theta: &ActionDistribution, z: &ElementSet)
        -> Vec<(f64, ExplorationSample<ElementSet>)> {
        let p = 1.0 / self.n as f64;
        (0..self.n).map(|j| (p, self.probe(theta, z, j))).collect()
    }

    fn explore(&self, _i: usize, theta: &ActionDistribution, z: &ElementSet, rng: &mut SimRng)
        -> ExplorationSample<ElementSet> {
        self.probe(theta, z, rng.gen_range(0..self.n))
    }

    fn local_optimum(&self, _i: usize, z: &ElementSet, f: &dyn Objective<ElementSet>)
        -> Result<ActionDistribution> {
        Ok(ActionDistribution::point_mass(self.n, argmax(&self.marginals(z, f))))
    }

    fn feasible_points(&self) -> Result<Vec<ElementSet>> {
        if self.n > ENUMERATION_LIMIT_N {
            let size = 1u128 << self.n;
            return Err(Error::TooLargeToEnumerate { size, limit: 1 << ENUMERATION_LIMIT_N });
        }
        Ok((0..1u64 << self.n)
            .filter(|m| m.count_ones() as usize <= self.k)
            .map(ElementSet)
            .collect())
    }
}

impl CardinalityInstance {
    /// Probe for element `j`: `w = n(θ_j·1 − e_j)`, `z_exp = z ∪ {j}`.
    fn probe(&self, theta: &ActionDistribution, z: &ElementSet, j: usize) -> ExplorationSample<ElementSet> {
        let n = self.n as f64;
        let tj = theta.probs()[j];
        let w = (0..self.n).map(|l| n * (tj - if l == j { 1.0 } else { 0.0 })).collect();
        ExplorationSample { w, z: z.with(j) }
    }
}
