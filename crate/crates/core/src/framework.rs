//! Shared abstractions: update parameters, feasible points, objective oracles,
//! the application description consumed by the learners, and the offline
//! iterative-greedy executor.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blackwell::Responder;
use crate::error::{Error, Result};

/// Tolerance under which a payoff coordinate still counts as nonnegative.
pub const PAYOFF_TOL: f64 = 1e-9;

/// Random source used everywhere. Every stochastic operation receives one explicitly.
pub type SimRng = ChaCha8Rng;

/// Deterministic child generator: the same `(seed, stream)` pair always yields the same sequence,
/// and distinct streams are independent.
pub fn split_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A probability distribution over a finite action set (grid indices or ground elements).
#[derive(Clone, Debug, PartialEq)]
pub struct ActionDistribution {
    probs: Vec<f64>,
}

impl ActionDistribution {
    /// Builds a distribution from weights that already sum to one (within 1e-9).
    /// Tiny negative round-off (above -1e-12) is clamped to zero.
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::BadSimplexPoint("empty support".into()));
        }
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -1e-12 {
                return Err(Error::BadSimplexPoint(format!("weight {p}")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::BadSimplexPoint(format!("total mass {total}")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(m: usize) -> Self {
        assert!(m >= 1, "distribution over an empty set");
        Self { probs: vec![1.0 / m as f64; m] }
    }

    pub fn point_mass(m: usize, j: usize) -> Self {
        assert!(j < m, "point mass index {j} out of range {m}");
        let mut probs = vec![0.0; m];
        probs[j] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn dot(&self, y: &[f64]) -> f64 {
        self.probs.iter().zip(y).map(|(p, v)| p * v).sum()
    }

    /// Inverse-CDF draw.
    pub fn sample(&self, rng: &mut SimRng) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last = 0;
        for (j, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last = j;
                if u < acc {
                    return j;
                }
            }
        }
        last
    }
}

/// Normalises nonnegative weights with positive total mass.
pub fn validate_distribution(weights: &[f64]) -> Result<ActionDistribution> {
    if weights.is_empty() {
        return Err(Error::BadSimplexPoint("empty support".into()));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::BadSimplexPoint(format!("negative or non-finite weight {w}")));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::BadSimplexPoint("zero total mass".into()));
    }
    Ok(ActionDistribution { probs: weights.iter().map(|w| w / total).collect() })
}

/// ℓ∞ distance of `v` to the nonnegative orthant.
pub fn payoff_nonneg_slack(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |acc, &x| acc.max(-x))
}

/// Index of the largest entry, lowest index on ties.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (j, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = j;
        }
    }
    best
}

/// Pure-form payoff `θᵀy·1 − y`.
pub fn pure_payoff(theta: &ActionDistribution, y: &[f64]) -> Vec<f64> {
    let base = theta.dot(y);
    y.iter().map(|v| base - v).collect()
}

/// A point of an application's feasible region.
pub trait FeasiblePoint: Clone + fmt::Debug + PartialEq + Send + Sync {
    /// Canonical bytes: one application tag byte followed by a little-endian index list.
    fn encode(&self) -> Vec<u8>;
}

/// An objective function `f: C → [0, 1]`.
pub trait Objective<P>: Send + Sync {
    fn value(&self, z: &P) -> f64;

    /// Identity tag used for logging and stream hashing.
    fn tag(&self) -> String;
}

pub type SharedObjective<P> = Arc<dyn Objective<P>>;

/// Evaluates and, in debug builds, checks the range contract.
pub fn eval<P>(f: &dyn Objective<P>, z: &P) -> f64 {
    let v = f.value(z);
    debug_assert!((-1e-12..=1.0 + 1e-12).contains(&v), "objective value {v} outside [0,1]");
    v
}

/// Weighted average of objectives; the average of submodular functions stays submodular.
pub struct MeanObjective<P> {
    parts: Vec<(SharedObjective<P>, f64)>,
}

impl<P> MeanObjective<P> {
    /// `parts` carries nonnegative multiplicities; they are normalised to sum to one.
    pub fn new(parts: Vec<(SharedObjective<P>, f64)>) -> Self {
        let total: f64 = parts.iter().map(|(_, w)| w).sum();
        assert!(total > 0.0, "mean of an empty objective family");
        Self { parts: parts.into_iter().map(|(f, w)| (f, w / total)).collect() }
    }
}

impl<P> Objective<P> for MeanObjective<P> {
    fn value(&self, z: &P) -> f64 {
        self.parts.iter().map(|(f, w)| w * f.value(z)).sum()
    }

    fn tag(&self) -> String {
        format!("mean[{}]", self.parts.len())
    }
}

/// A probe `(w_exp, z_exp)` whose product `f(z_exp)·w_exp` estimates a payoff vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplorationSample<P> {
    pub w: Vec<f64>,
    pub z: P,
}

/// Draws one element of a finite weighted support.
pub fn sample_support<T: Clone>(support: &[(f64, T)], rng: &mut SimRng) -> T {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (p, item) in support {
        acc += p;
        if u < acc {
            return item.clone();
        }
    }
    support.iter().rev().find(|(p, _)| *p > 0.0).expect("empty support").1.clone()
}

/// An application's offline iterative-greedy description.
pub trait GreedyInstance: Send + Sync {
    type Point: FeasiblePoint;

    /// Number of subproblems `N`.
    fn num_subproblems(&self) -> usize;
    /// Dimension of every subproblem's action set and payoff vector.
    fn payoff_dim(&self) -> usize;
    /// Approximation factor of the offline algorithm.
    fn gamma(&self) -> f64;
    /// ℓ∞ bound on payoff coordinates.
    fn payoff_diameter(&self) -> f64;
    /// ℓ∞ bound on exploration estimates `f(z_exp)·w_exp`.
    fn estimator_diameter(&self) -> f64;
    /// Halfspace oracle that turns an OLO iterate into an update parameter.
    fn responder(&self) -> Responder;

    fn initial_point(&self) -> Self::Point;
    fn is_feasible(&self, z: &Self::Point) -> bool;

    /// `Payoff(θ, z^(i−1), f)` for subproblem `i` (0-based).
    fn payoff(
        &self,
        i: usize,
        theta: &ActionDistribution,
        z: &Self::Point,
        f: &dyn Objective<Self::Point>,
    ) -> Vec<f64>;

    /// Full distribution of the local update.
    fn local_update_support(&self, i: usize, theta: &ActionDistribution, z: &Self::Point)
        -> Vec<(f64, Self::Point)>;

    fn local_update(
        &self,
        i: usize,
        theta: &ActionDistribution,
        z: &Self::Point,
        rng: &mut SimRng,
    ) -> Self::Point {
        sample_support(&self.local_update_support(i, theta, z), rng)
    }

    /// Distribution of the output transformation applied after subproblem `N`.
    fn finalize_support(&self, z: &Self::Point) -> Vec<(f64, Self::Point)> {
        vec![(1.0, z.clone())]
    }

    fn finalize(&self, z: &Self::Point, rng: &mut SimRng) -> Self::Point {
        sample_support(&self.finalize_support(z), rng)
    }

    /// Full distribution of the exploration sampler.
    fn explore_support(
        &self,
        i: usize,
        theta: &ActionDistribution,
        z: &Self::Point,
    ) -> Vec<(f64, ExplorationSample<Self::Point>)>;

    fn explore(
        &self,
        i: usize,
        theta: &ActionDistribution,
        z: &Self::Point,
        rng: &mut SimRng,
    ) -> ExplorationSample<Self::Point> {
        sample_support(&self.explore_support(i, theta, z), rng)
    }

    /// Offline local optimiser: a θ with nonnegative payoff at `z`.
    fn local_optimum(
        &self,
        i: usize,
        z: &Self::Point,
        f: &dyn Objective<Self::Point>,
    ) -> Result<ActionDistribution>;

    /// Every feasible point, or `TooLargeToEnumerate` beyond the application's limit.
    fn feasible_points(&self) -> Result<Vec<Self::Point>>;
}

/// Trace of an offline iterative-greedy run.
#[derive(Clone, Debug)]
pub struct OfflineRun<P> {
    pub output: P,
    pub thetas: Vec<ActionDistribution>,
    /// `z^(0), …, z^(N)` before the output transformation.
    pub points: Vec<P>,
}

/// Runs the offline iterative greedy with a caller-supplied local optimiser, checking
/// that each chosen θ has nonnegative payoff.
pub fn offline_ig_run<I, O>(
    instance: &I,
    f: &dyn Objective<I::Point>,
    mut local_optimizer: O,
    rng: &mut SimRng,
) -> Result<OfflineRun<I::Point>>
where
    I: GreedyInstance,
    O: FnMut(usize, &I::Point, &dyn Objective<I::Point>) -> Result<ActionDistribution>,
{
    let mut z = instance.initial_point();
    let mut points = vec![z.clone()];
    let mut thetas = Vec::with_capacity(instance.num_subproblems());
    for i in 0..instance.num_subproblems() {
        let theta = local_optimizer(i, &z, f)?;
        let slack = payoff_nonneg_slack(&instance.payoff(i, &theta, &z, f));
        if slack > PAYOFF_TOL {
            return Err(Error::InfeasibleTheta { subproblem: i, slack });
        }
        z = instance.local_update(i, &theta, &z, rng);
        debug_assert!(instance.is_feasible(&z));
        points.push(z.clone());
        thetas.push(theta);
    }
    let output = instance.finalize(&z, rng);
    Ok(OfflineRun { output, thetas, points })
}

/// Offline iterative greedy using the instance's own local optimiser.
pub fn offline_greedy<I: GreedyInstance>(
    instance: &I,
    f: &dyn Objective<I::Point>,
    rng: &mut SimRng,
) -> Result<OfflineRun<I::Point>> {
    offline_ig_run(instance, f, |i, z, f| instance.local_optimum(i, z, f), rng)
}

/// Exact expectations over the tree of local-update (and output) randomness.
#[derive(Clone, Debug)]
pub struct ChainExpectation {
    /// `E[f(z_out)]`.
    pub value: f64,
    /// `E[Payoff(θ^(i), z^(i−1), f)]` for every subproblem.
    pub payoffs: Vec<Vec<f64>>,
}

/// Enumerates every branch of the chain. `theta_for(i, z)` picks subproblem `i`'s parameter
/// given the realised prefix `z`; exponential in `N`, meant for tiny instances.
pub fn exact_chain_expectation<I, T>(
    instance: &I,
    f: &dyn Objective<I::Point>,
    mut theta_for: T,
) -> Result<ChainExpectation>
where
    I: GreedyInstance,
    T: FnMut(usize, &I::Point) -> Result<ActionDistribution>,
{
    let n = instance.num_subproblems();
    let d = instance.payoff_dim();
    let mut acc = ChainExpectation { value: 0.0, payoffs: vec![vec![0.0; d]; n] };
    let z0 = instance.initial_point();
    descend(instance, f, &mut theta_for, 0, &z0, 1.0, &mut acc)?;
    Ok(acc)
}

fn descend<I, T>(
    instance: &I,
    f: &dyn Objective<I::Point>,
    theta_for: &mut T,
    i: usize,
    z: &I::Point,
    prob: f64,
    acc: &mut ChainExpectation,
) -> Result<()>
where
    I: GreedyInstance,
    T: FnMut(usize, &I::Point) -> Result<ActionDistribution>,
{
    if i == instance.num_subproblems() {
        for (p, out) in instance.finalize_support(z) {
            acc.value += prob * p * eval(f, &out);
        }
        return Ok(());
    }
    let theta = theta_for(i, z)?;
    let payoff = instance.payoff(i, &theta, z, f);
    for (a, p) in acc.payoffs[i].iter_mut().zip(&payoff) {
        *a += prob * p;
    }
    for (p, next) in instance.local_update_support(i, &theta, z) {
        if p > 0.0 {
            descend(instance, f, theta_for, i + 1, &next, prob * p, acc)?;
        }
    }
    Ok(())
}
