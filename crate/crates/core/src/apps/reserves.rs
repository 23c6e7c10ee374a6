//! Personalised reserve prices in a second-price auction.
//!
//! Subproblem `i` picks bidder `i`'s reserve from a price grid by learning the
//! revenue-from-reserves curve `q^(i)`; the output is a fair coin between the all-zero
//! vector and the learned reserves.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::product_space;
use crate::blackwell::Responder;
use crate::error::{Error, Result};
use crate::framework::{
    argmax, eval, pure_payoff, ActionDistribution, ExplorationSample, FeasiblePoint, GreedyInstance,
    Objective, SimRng,
};

/// Largest reserve space `m^n` the brute-force benchmark enumerates.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

/// Candidate reserve prices `0 = ρ_1 < … < ρ_m ≤ 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PriceGrid {
    rho: Vec<f64>,
}

impl TryFrom<Vec<f64>> for PriceGrid {
    type Error = Error;

    fn try_from(rho: Vec<f64>) -> Result<Self> {
        PriceGrid::new(rho)
    }
}

impl From<PriceGrid> for Vec<f64> {
    fn from(g: PriceGrid) -> Self {
        g.rho
    }
}

impl PriceGrid {
    pub fn new(rho: Vec<f64>) -> Result<Self> {
        if rho.first() != Some(&0.0) {
            return Err(Error::BadParams("price grid must start at 0".into()));
        }
        if rho.windows(2).any(|w| !(w[0] < w[1])) || rho.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::BadParams("price grid must be strictly increasing within [0,1]".into()));
        }
        Ok(Self { rho })
    }

    /// `m` equally spaced prices `{0, 1/(m−1), …, 1}`.
    pub fn uniform(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::BadParams("uniform grid needs at least two prices".into()));
        }
        Self::new((0..m).map(|k| k as f64 / (m - 1) as f64).collect())
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }
}

/// The multiples of `1/m` in `[0, 1]`: `{0, 1/m, …, 1}`.
pub fn discretize_reserves(m: usize) -> Result<PriceGrid> {
    if m == 0 {
        return Err(Error::BadParams("discretisation step count must be ≥ 1".into()));
    }
    PriceGrid::new((0..=m).map(|k| k as f64 / m as f64).collect())
}

/// Bidder valuations in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ValuationProfile {
    v: Vec<f64>,
}

impl TryFrom<Vec<f64>> for ValuationProfile {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        ValuationProfile::new(v)
    }
}

impl From<ValuationProfile> for Vec<f64> {
    fn from(p: ValuationProfile) -> Self {
        p.v
    }
}

impl ValuationProfile {
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() || v.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::BadParams("valuations must lie in [0,1]".into()));
        }
        Ok(Self { v })
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }
}

/// Second-price revenue with personalised reserves. Bidders with `v_j ≥ r_j` clear; the
/// highest clearing bidder (lowest index on ties) wins and pays the larger of their own
/// reserve and the second-highest clearing valuation.
pub fn auction_revenue(r: &[f64], v: &[f64]) -> f64 {
    let mut winner: Option<usize> = None;
    let mut second = 0.0f64;
    for j in 0..v.len() {
        if v[j] >= r[j] {
            match winner {
                Some(w) if v[j] > v[w] => {
                    second = second.max(v[w]);
                    winner = Some(j);
                }
                Some(_) => second = second.max(v[j]),
                None => winner = Some(j),
            }
        }
    }
    winner.map_or(0.0, |w| r[w].max(second))
}

/// Bidder `i`'s revenue-from-reserves: `r` when `i` is the highest bidder (lowest index on ties)
/// and `r ∈ (v_second, v_i]`, else 0. Equals `f(r·1, v) − f(r·(1 − e_i), v)`.
pub fn revenue_from_reserves(i: usize, r: f64, v: &[f64]) -> f64 {
    let top = argmax(v);
    if top != i {
        return 0.0;
    }
    let second = v.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).fold(0.0, f64::max);
    if r > second && r <= v[i] {
        r
    } else {
        0.0
    }
}

/// Reserve vector with grid indices; `values[j] = ρ_{idx[j]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReserveVector {
    pub idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl FeasiblePoint for ReserveVector {
    fn encode(&self) -> Vec<u8> {
        super::encode_indices(3, self.idx.iter().copied())
    }
}

impl Objective<ReserveVector> for ValuationProfile {
    fn value(&self, z: &ReserveVector) -> f64 {
        auction_revenue(&z.values, &self.v)
    }

    fn tag(&self) -> String {
        format!("{:?}", self.v)
    }
}

/// Reads valuation profiles from CSV, one profile per row, no header.
pub fn load_valuations_csv(path: &Path) -> Result<Vec<ValuationProfile>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let v = record
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Config(format!("valuation {s:?}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        out.push(ValuationProfile::new(v)?);
    }
    Ok(out)
}

/// `n` bidders, reserves on `grid`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReserveInstance {
    n: usize,
    grid: PriceGrid,
}

impl ReserveInstance {
    pub fn new(n: usize, grid: PriceGrid) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadParams("need at least one bidder".into()));
        }
        Ok(Self { n, grid })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> &PriceGrid {
        &self.grid
    }

    pub fn point(&self, idx: Vec<usize>) -> ReserveVector {
        let values = idx.iter().map(|&k| self.grid.rho[k]).collect();
        ReserveVector { idx, values }
    }

    fn constant(&self, k: usize) -> ReserveVector {
        self.point(vec![k; self.n])
    }

    fn constant_except(&self, k: usize, i: usize) -> ReserveVector {
        let mut idx = vec![k; self.n];
        idx[i] = 0;
        self.point(idx)
    }

    /// `q^(i)(ρ_j)` for every grid price, via `f(ρ_j·1) − f(ρ_j·(1 − e_i))`, so that any
    /// revenue oracle (including averages over profiles) can be used.
    pub fn revenue_curve(&self, i: usize, f: &dyn Objective<ReserveVector>) -> Vec<f64> {
        (0..self.grid.len())
            .map(|k| eval(f, &self.constant(k)) - eval(f, &self.constant_except(k, i)))
            .collect()
    }
}

impl GreedyInstance for ReserveInstance {
    type Point = ReserveVector;

    fn num_subproblems(&self) -> usize {
        self.n
    }

    fn payoff_dim(&self) -> usize {
        self.grid.len()
    }

    fn gamma(&self) -> f64 {
        0.5
    }

    fn payoff_diameter(&self) -> f64 {
        2.0
    }

    fn estimator_diameter(&self) -> f64 {
        2.0 * self.grid.len() as f64
    }

    fn responder(&self) -> Responder {
        Responder::Proportional
    }

    fn initial_point(&self) -> ReserveVector {
        self.constant(0)
    }

    fn is_feasible(&self, z: &ReserveVector) -> bool {
        z.idx.len() == self.n
            && z.idx.iter().zip(&z.values).all(|(&k, &v)| k < self.grid.len() && self.grid.rho[k] == v)
    }

    fn payoff(&self, i: usize, theta: &ActionDistribution, _z: &ReserveVector, f: &dyn Objective<ReserveVector>)
        -> Vec<f64> {
        pure_payoff(theta, &self.revenue_curve(i, f))
    }

    fn local_update_support(&self, i: usize, theta: &ActionDistribution, z: &ReserveVector)
        -> Vec<(f64, ReserveVector)> {
        theta
            .probs()
            .iter()
            .enumerate()
            .map(|(k, &p)| {
                let mut idx = z.idx.clone();
                idx[i] = k;
                (p, self.point(idx))
            })
            .collect()
    }

    fn local_update(&self, i: usize, theta: &ActionDistribution, z: &ReserveVector, rng: &mut SimRng)
        -> ReserveVector {
        let mut idx = z.idx.clone();
        idx[i] = theta.sample(rng);
        self.point(idx)
    }

    fn finalize_support(&self, z: &ReserveVector) -> Vec<(f64, ReserveVector)> {
        vec![(0.5, self.constant(0)), (0.5, z.clone())]
    }

    fn finalize(&self, z: &ReserveVector, rng: &mut SimRng) -> ReserveVector {
        if rng.gen::<bool>() {
            self.constant(0)
        } else {
            z.clone()
        }
    }

    /// `2m` equally likely probes: `(±2m(θ_j·1 − e_j), ρ_j·1)` and `ρ_j·(1 − e_i)` respectively.
    fn explore_support(&self, i: usize, theta: &ActionDistribution, _z: &ReserveVector)
        -> Vec<(f64, ExplorationSample<ReserveVector>)> {
        let m = self.grid.len();
        let p = 1.0 / (2 * m) as f64;
        (0..m)
            .flat_map(|j| {
                let w = self.probe_weights(theta, j);
                let neg: Vec<f64> = w.iter().map(|x| -x).collect();
                [
                    (p, ExplorationSample { w, z: self.constant(j) }),
                    (p, ExplorationSample { w: neg, z: self.constant_except(j, i) }),
                ]
            })
            .collect()
    }

    fn explore(&self, i: usize, theta: &ActionDistribution, _z: &ReserveVector, rng: &mut SimRng)
        -> ExplorationSample<ReserveVector> {
        let j = rng.gen_range(0..self.grid.len());
        let w = self.probe_weights(theta, j);
        if rng.gen::<bool>() {
            ExplorationSample { w, z: self.constant(j) }
        } else {
            ExplorationSample { w: w.iter().map(|x| -x).collect(), z: self.constant_except(j, i) }
        }
    }

    fn local_optimum(&self, i: usize, _z: &ReserveVector, f: &dyn Objective<ReserveVector>)
        -> Result<ActionDistribution> {
        Ok(ActionDistribution::point_mass(self.grid.len(), argmax(&self.revenue_curve(i, f))))
    }

    fn feasible_points(&self) -> Result<Vec<ReserveVector>> {
        Ok(product_space(self.grid.len(), self.n, ENUMERATION_LIMIT)?
            .into_iter()
            .map(|idx| self.point(idx))
            .collect())
    }
}

impl ReserveInstance {
    fn probe_weights(&self, theta: &ActionDistribution, j: usize) -> Vec<f64> {
        let m = self.grid.len();
        let scale = 2.0 * m as f64;
        let tj = theta.probs()[j];
        (0..m).map(|l| scale * (tj - if l == j { 1.0 } else { 0.0 })).collect()
    }
}
