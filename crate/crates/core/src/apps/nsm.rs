//! Non-monotone submodular maximisation on a discrete lattice `R^n`, `R = {ρ_0 < … < ρ_{m−1}}`,
//! by the randomised bi-greedy.
//!
//! Subproblem `i` fixes coordinate `i` of both a lower point (undecided coordinates at `ρ_0`)
//! and an upper point (undecided coordinates at `ρ_{m−1}`). Marginals relative to each bound
//! are `α(k) = f(k, lower_{−i}) − f(lower)` and `β(k) = f(k, upper_{−i}) − f(upper)`.

use std::sync::Arc;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::coverage::SetFunction;
use super::{encode_indices, product_space};
use crate::blackwell::Responder;
use crate::error::{Error, Result};
use crate::framework::{
    argmax, eval, ActionDistribution, ExplorationSample, FeasiblePoint, GreedyInstance, Objective,
    SimRng, PAYOFF_TOL,
};

/// Largest lattice `m^n` the brute-force benchmark enumerates.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

/// Lattice point as grid indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticePoint {
    pub idx: Vec<usize>,
}

impl FeasiblePoint for LatticePoint {
    fn encode(&self) -> Vec<u8> {
        encode_indices(4, self.idx.iter().copied())
    }
}

/// Dense value table over `{0..m}^n` in lexicographic order (last coordinate fastest).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableLattice {
    pub n: usize,
    pub m: usize,
    pub values: Vec<f64>,
}

impl TableLattice {
    pub fn new(n: usize, m: usize, values: Vec<f64>) -> Result<Self> {
        let size = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if m == 0 || n == 0 || size != values.len() as u128 {
            return Err(Error::BadParams(format!("table of {} values for m={m}, n={n}", values.len())));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::BadParams("lattice values must lie in [0,1]".into()));
        }
        Ok(Self { n, m, values })
    }

    /// Tabulates `g` and rescales it affinely onto `[0, 1]` (a positive rescaling keeps
    /// submodularity).
    pub fn from_fn(n: usize, m: usize, g: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let raw: Vec<f64> = product_space(m, n, ENUMERATION_LIMIT)?.iter().map(|x| g(x)).collect();
        let lo = raw.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let span = if hi > lo { hi - lo } else { 1.0 };
        Self::new(n, m, raw.iter().map(|v| ((v - lo) / span).clamp(0.0, 1.0)).collect())
    }

    /// Random lattice-submodular function `Σ_i u_i(x_i) − Σ_{i<j} b_ij h_i(x_i) h_j(x_j)` with
    /// arbitrary unary terms, increasing `h_i`, and `b_ij ≥ 0`; non-monotone in general.
    pub fn random_quadratic(n: usize, m: usize, rng: &mut SimRng) -> Result<Self> {
        let unary: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.gen::<f64>()).collect()).collect();
        let h: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let mut acc = 0.0;
                (0..m)
                    .map(|k| {
                        if k > 0 {
                            acc += rng.gen::<f64>();
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let b: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen::<f64>()).collect()).collect();
        Self::from_fn(n, m, |x| {
            let mut v: f64 = (0..n).map(|i| unary[i][x[i]]).sum();
            for i in 0..n {
                for j in i + 1..n {
                    v -= b[i][j] * h[i][x[i]] * h[j][x[j]];
                }
            }
            v
        })
    }

    /// Random set function (m = 2): weighted graph cut plus a modular term of either sign.
    pub fn random_cut_plus_modular(n: usize, rng: &mut SimRng) -> Result<Self> {
        let w: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen::<f64>()).collect()).collect();
        let a: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        Self::from_fn(n, 2, |x| {
            let mut v = 0.0;
            for i in 0..n {
                v += a[i] * x[i] as f64;
                for j in i + 1..n {
                    if x[i] != x[j] {
                        v += w[i][j];
                    }
                }
            }
            v
        })
    }

    fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &k| acc * self.m + k)
    }
}

impl Objective<LatticePoint> for TableLattice {
    fn value(&self, z: &LatticePoint) -> f64 {
        self.values[self.offset(&z.idx)]
    }

    fn tag(&self) -> String {
        serde_json::to_string(self).expect("table serialises")
    }
}

/// A set function on the lattice `{0, 1}^n`.
pub struct SetLattice(pub Arc<dyn SetFunction>);

/// Embeds a set function with `R = {0, 1}`.
pub fn set_function_wrapper(f: Arc<dyn SetFunction>) -> SetLattice {
    SetLattice(f)
}

impl Objective<LatticePoint> for SetLattice {
    fn value(&self, z: &LatticePoint) -> f64 {
        let mask = z.idx.iter().enumerate().filter(|(_, &k)| k == 1).fold(0u64, |m, (i, _)| m | (1 << i));
        self.0.eval_set(mask)
    }

    fn tag(&self) -> String {
        self.0.describe()
    }
}

type ContinuousFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A continuous function on `[0,1]^n` restricted to the grid `{0, 1/m, …, 1}`.
pub struct GridLattice {
    f: Arc<ContinuousFn>,
    grid: Vec<f64>,
    lipschitz: f64,
}

/// Restricts a coordinate-wise `L`-Lipschitz function to `{0, 1/m, …, 1}^n`; the grid optimum
/// is within `L·n/m` of the continuous one.
pub fn lipschitz_grid_wrapper(f: Arc<ContinuousFn>, lipschitz: f64, m: usize) -> GridLattice {
    assert!(m >= 1);
    GridLattice { f, grid: (0..=m).map(|k| k as f64 / m as f64).collect(), lipschitz }
}

impl GridLattice {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Number of grid values per coordinate.
    pub fn levels(&self) -> usize {
        self.grid.len()
    }

    /// Bound on the gap between continuous and grid optima for `n` coordinates.
    pub fn discretization_gap(&self, n: usize) -> f64 {
        self.lipschitz * n as f64 / (self.grid.len() - 1) as f64
    }
}

impl Objective<LatticePoint> for GridLattice {
    fn value(&self, z: &LatticePoint) -> f64 {
        let x: Vec<f64> = z.idx.iter().map(|&k| self.grid[k]).collect();
        (self.f)(&x)
    }

    fn tag(&self) -> String {
        format!("grid-lattice[{}]", self.grid.len())
    }
}

/// `n` coordinates with `m` grid levels each.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeInstance {
    n: usize,
    m: usize,
}

impl LatticeInstance {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::BadParams("lattice needs n ≥ 1 and m ≥ 1".into()));
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// The `(lower, upper)` bounds at frontier `i` given the decided prefix in `z`.
    pub fn bounds(&self, i: usize, z: &LatticePoint) -> (LatticePoint, LatticePoint) {
        let mut lower = z.idx.clone();
        let mut upper = z.idx.clone();
        for k in i..self.n {
            lower[k] = 0;
            upper[k] = self.m - 1;
        }
        (LatticePoint { idx: lower }, LatticePoint { idx: upper })
    }

    /// `(α, β)` at frontier `i`.
    pub fn marginals(&self, i: usize, z: &LatticePoint, f: &dyn Objective<LatticePoint>) -> (Vec<f64>, Vec<f64>) {
        let (lower, upper) = self.bounds(i, z);
        let fl = eval(f, &lower);
        let fu = eval(f, &upper);
        let mut alpha = vec![0.0; self.m];
        let mut beta = vec![0.0; self.m];
        for k in 0..self.m {
            if k != 0 {
                alpha[k] = eval(f, &with_coord(&lower, i, k)) - fl;
            }
            if k != self.m - 1 {
                beta[k] = eval(f, &with_coord(&upper, i, k)) - fu;
            }
        }
        (alpha, beta)
    }
}

fn with_coord(z: &LatticePoint, i: usize, k: usize) -> LatticePoint {
    let mut idx = z.idx.clone();
    idx[i] = k;
    LatticePoint { idx }
}

/// Comparison function `ζ(j, k)`: `α_j − α_k` when `j ≥ k`, else `β_j − β_k`.
pub fn comparison(alpha: &[f64], beta: &[f64], j: usize, k: usize) -> f64 {
    if j >= k {
        alpha[j] - alpha[k]
    } else {
        beta[j] - beta[k]
    }
}

/// Matrix `P[j][k] = ½α_k + ½β_k − ζ(j, k)`, so that `Payoff_j(θ) = Σ_k θ_k P[j][k]`.
pub fn payoff_matrix(alpha: &[f64], beta: &[f64]) -> Vec<Vec<f64>> {
    let m = alpha.len();
    (0..m)
        .map(|j| (0..m).map(|k| 0.5 * alpha[k] + 0.5 * beta[k] - comparison(alpha, beta, j, k)).collect())
        .collect()
}

/// `Payoff_j = E_{k∼θ}[½α_k + ½β_k − ζ(j, k)]`.
pub fn nsm_payoff(theta: &ActionDistribution, alpha: &[f64], beta: &[f64]) -> Vec<f64> {
    payoff_matrix(alpha, beta).iter().map(|row| theta.dot(row)).collect()
}

/// Offline local step: a distribution with nonnegative payoff against every grid value.
///
/// With `z_ℓ = argmax β` and `z_u = argmax α` (lowest index on ties): if `z_u ≤ z_ℓ` the point
/// mass on `z_ℓ` works; otherwise an LP maximises the smallest payoff over `j ∈ [z_ℓ, z_u]`.
pub fn nsm_local_optimize(alpha: &[f64], beta: &[f64]) -> Result<ActionDistribution> {
    let m = alpha.len();
    let zl = argmax(beta);
    let zu = argmax(alpha);
    if zu <= zl {
        return Ok(ActionDistribution::point_mass(m, zl));
    }
    let p = payoff_matrix(alpha, beta);
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let theta: Vec<_> = (0..m).map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    let t = lp.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
    for row in &p[zl..=zu] {
        let mut expr: Vec<(minilp::Variable, f64)> =
            theta.iter().zip(row).filter(|(_, &c)| c != 0.0).map(|(&v, &c)| (v, c)).collect();
        expr.push((t, -1.0));
        lp.add_constraint(expr.as_slice(), ComparisonOp::Ge, 0.0);
    }
    let simplex: Vec<(minilp::Variable, f64)> = theta.iter().map(|&v| (v, 1.0)).collect();
    lp.add_constraint(simplex.as_slice(), ComparisonOp::Eq, 1.0);
    let sol = lp.solve().map_err(|e| Error::LpInfeasible(format!("local step: {e}")))?;
    let raw: Vec<f64> = theta.iter().map(|&v| sol[v].max(0.0)).collect();
    let mass: f64 = raw.iter().sum();
    let dist = ActionDistribution::new(raw.iter().map(|x| x / mass).collect())?;
    let worst = p[zl..=zu].iter().map(|row| dist.dot(row)).fold(f64::INFINITY, f64::min);
    if worst < -PAYOFF_TOL {
        return Err(Error::LpInfeasible(format!("best local step has payoff {worst:e}")));
    }
    Ok(dist)
}

impl GreedyInstance for LatticeInstance {
    type Point = LatticePoint;

    fn num_subproblems(&self) -> usize {
        self.n
    }

    fn payoff_dim(&self) -> usize {
        self.m
    }

    fn gamma(&self) -> f64 {
        0.5
    }

    fn payoff_diameter(&self) -> f64 {
        3.0
    }

    fn estimator_diameter(&self) -> f64 {
        6.0 * self.m as f64
    }

    fn responder(&self) -> Responder {
        Responder::NsmSaddle { m: self.m }
    }

    fn initial_point(&self) -> LatticePoint {
        LatticePoint { idx: vec![0; self.n] }
    }

    fn is_feasible(&self, z: &LatticePoint) -> bool {
        z.idx.len() == self.n && z.idx.iter().all(|&k| k < self.m)
    }

    fn payoff(&self, i: usize, theta: &ActionDistribution, z: &LatticePoint, f: &dyn Objective<LatticePoint>)
        -> Vec<f64> {
        let (alpha, beta) = self.marginals(i, z, f);
        nsm_payoff(theta, &alpha, &beta)
    }

    fn local_update_support(&self, i: usize, theta: &ActionDistribution, z: &LatticePoint)
        -> Vec<(f64, LatticePoint)> {
        theta.probs().iter().enumerate().map(|(k, &p)| (p, with_coord(z, i, k))).collect()
    }

    fn local_update(&self, i: usize, theta: &ActionDistribution, z: &LatticePoint, rng: &mut SimRng)
        -> LatticePoint {
        with_coord(z, i, theta.sample(rng))
    }

    /// With probability ¼ each, `(−2·1, lower)` and `(−2·1, upper)`; for each `k`, with
    /// probability `1/(4m)` each, `(4m·a_k, (k, lower_{−i}))` and `(4m·b_k, (k, upper_{−i}))` where
    /// `a_k[j] = ½θ_k − [j = k] Σ_{l<k} θ_l + [j > k] θ_k` and
    /// `b_k[j] = ½θ_k − [j = k] Σ_{l>k} θ_l + [j < k] θ_k`.
    fn explore_support(&self, i: usize, theta: &ActionDistribution, z: &LatticePoint)
        -> Vec<(f64, ExplorationSample<LatticePoint>)> {
        let m = self.m;
        let (lower, upper) = self.bounds(i, z);
        let mut out = vec![
            (0.25, ExplorationSample { w: vec![-2.0; m], z: lower.clone() }),
            (0.25, ExplorationSample { w: vec![-2.0; m], z: upper.clone() }),
        ];
        let p = 1.0 / (4 * m) as f64;
        for k in 0..m {
            let (a, b) = self.probe_weights(theta, k);
            out.push((p, ExplorationSample { w: a, z: with_coord(&lower, i, k) }));
            out.push((p, ExplorationSample { w: b, z: with_coord(&upper, i, k) }));
        }
        out
    }

    fn explore(&self, i: usize, theta: &ActionDistribution, z: &LatticePoint, rng: &mut SimRng)
        -> ExplorationSample<LatticePoint> {
        let (lower, upper) = self.bounds(i, z);
        let m = self.m;
        match rng.gen_range(0..4) {
            0 => ExplorationSample { w: vec![-2.0; m], z: lower },
            1 => ExplorationSample { w: vec![-2.0; m], z: upper },
            side => {
                let k = rng.gen_range(0..m);
                let (a, b) = self.probe_weights(theta, k);
                if side == 2 {
                    ExplorationSample { w: a, z: with_coord(&lower, i, k) }
                } else {
                    ExplorationSample { w: b, z: with_coord(&upper, i, k) }
                }
            }
        }
    }

    fn local_optimum(&self, i: usize, z: &LatticePoint, f: &dyn Objective<LatticePoint>)
        -> Result<ActionDistribution> {
        let (alpha, beta) = self.marginals(i, z, f);
        nsm_local_optimize(&alpha, &beta)
    }

    fn feasible_points(&self) -> Result<Vec<LatticePoint>> {
        Ok(product_space(self.m, self.n, ENUMERATION_LIMIT)?
            .into_iter()
            .map(|idx| LatticePoint { idx })
            .collect())
    }
}

impl LatticeInstance {
    fn probe_weights(&self, theta: &ActionDistribution, k: usize) -> (Vec<f64>, Vec<f64>) {
        let m = self.m;
        let t = theta.probs();
        let scale = 4.0 * m as f64;
        let below: f64 = t[..k].iter().sum();
        let above: f64 = t[k + 1..].iter().sum();
        let a = (0..m)
            .map(|j| {
                let mut v = 0.5 * t[k];
                if j == k {
                    v -= below;
                }
                if j > k {
                    v += t[k];
                }
                scale * v
            })
            .collect();
        let b = (0..m)
            .map(|j| {
                let mut v = 0.5 * t[k];
                if j == k {
                    v -= above;
                }
                if j < k {
                    v += t[k];
                }
                scale * v
            })
            .collect();
        (a, b)
    }
}
