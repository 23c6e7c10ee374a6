//! Halfspace response oracles: given an OLO iterate `w ∈ K`, pick an update parameter `θ`
//! with `⟨w, Payoff(θ, ·)⟩ ≤ 0` against every adversary action.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};
use crate::framework::ActionDistribution;

/// Largest worst-case value the saddle oracle may certify.
pub const SADDLE_TOL: f64 = 1e-6;

/// Which oracle an application's payoff needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Responder {
    /// Pure-form payoffs `θᵀy·1 − y`.
    Proportional,
    /// Bi-greedy lattice payoffs over a grid of `m` values.
    NsmSaddle { m: usize },
}

/// A response together with its certified worst-case value of `⟨w/Σw, −Payoff⟩`.
#[derive(Clone, Debug)]
pub struct Response {
    pub theta: ActionDistribution,
    pub value: f64,
}

impl Responder {
    pub fn respond(&self, w: &[f64]) -> Result<Response> {
        match *self {
            Responder::Proportional => {
                Ok(Response { theta: proportional_response(w), value: 0.0 })
            }
            Responder::NsmSaddle { m } => {
                if w.len() != m {
                    return Err(Error::DimensionMismatch { expected: m, got: w.len() });
                }
                saddle_response(w)
            }
        }
    }
}

/// `θ = w/Σw`, or uniform when `w` vanishes. Makes `⟨w, θᵀy·1 − y⟩ = 0` for every `y`.
pub fn proportional_response(w: &[f64]) -> ActionDistribution {
    let total: f64 = w.iter().map(|v| v.min(0.0)).sum();
    if total < -1e-12 {
        let probs: Vec<f64> = w.iter().map(|v| v.min(0.0) / total).collect();
        ActionDistribution::new(probs).expect("normalised nonpositive vector")
    } else {
        ActionDistribution::uniform(w.len())
    }
}

/// Coefficients of `Σ_j u_j (−Payoff_j(θ))` on the free marginal variables
/// `(α_1, …, α_{m−1}, β_0, …, β_{m−2})`, as a matrix acting on `θ`.
///
/// `−Payoff_j(θ) = Σ_k θ_k [ζ(j,k) − ½α_k − ½β_k]` with `ζ(j,k) = α_j − α_k` for `j > k` and
/// `β_j − β_k` for `j < k`; `α_0 = β_{m−1} = 0` are dropped.
pub fn saddle_coefficients(u: &[f64]) -> Vec<Vec<f64>> {
    let m = u.len();
    let mut rows = Vec::with_capacity(2 * (m - 1));
    for l in 1..m {
        let tail: f64 = u[l + 1..].iter().sum();
        let row: Vec<f64> = (0..m)
            .map(|k| match k.cmp(&l) {
                std::cmp::Ordering::Less => u[l],
                std::cmp::Ordering::Equal => -tail - 0.5,
                std::cmp::Ordering::Greater => 0.0,
            })
            .collect();
        rows.push(row);
    }
    for l in 0..m - 1 {
        let head: f64 = u[..l].iter().sum();
        let row: Vec<f64> = (0..m)
            .map(|k| match k.cmp(&l) {
                std::cmp::Ordering::Greater => u[l],
                std::cmp::Ordering::Equal => -head - 0.5,
                std::cmp::Ordering::Less => 0.0,
            })
            .collect();
        rows.push(row);
    }
    rows
}

/// Coefficient of free variable `v` in difference constraint `k`:
/// `α_k − α_{k+1} + β_{k+1} − β_k ≤ 0`.
fn difference_coefficient(m: usize, k: usize, v: usize) -> f64 {
    let alpha = |l: usize| l - 1; // α_l, l ≥ 1
    let beta = |l: usize| (m - 1) + l; // β_l, l ≤ m − 2
    let mut c = 0.0;
    if k >= 1 && v == alpha(k) {
        c += 1.0;
    }
    if v == alpha(k + 1) {
        c -= 1.0;
    }
    if k + 1 <= m - 2 && v == beta(k + 1) {
        c += 1.0;
    }
    if k <= m - 2 && v == beta(k) {
        c -= 1.0;
    }
    c
}

/// Minimises over `θ ∈ Δ(m)` the maximum over the marginal polytope
/// `A_m = {(α, β) ∈ [−1,1]^{2m}: α_0 = 0, β_{m−1} = 0, α_{k+1} − α_k ≥ β_{k+1} − β_k}`
/// of `Σ_j u_j (−Payoff_j(θ))`, `u = w/Σw`.
///
/// The inner maximum is replaced by its LP dual, `min Σ|c(θ) − Gᵀν|` over `ν ≥ 0`, which
/// turns the saddle problem into a single linear program in `(θ, ν, s⁺, s⁻)`.
pub fn saddle_response(w: &[f64]) -> Result<Response> {
    let m = w.len();
    let total: f64 = w.iter().map(|v| v.min(0.0)).sum();
    if m == 1 || total > -1e-12 {
        return Ok(Response { theta: ActionDistribution::uniform(m), value: 0.0 });
    }
    let u: Vec<f64> = w.iter().map(|v| v.min(0.0) / total).collect();
    let coef = saddle_coefficients(&u);
    let nvars = 2 * (m - 1);

    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let theta: Vec<_> = (0..m).map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    let nu: Vec<_> = (0..m - 1).map(|_| lp.add_var(0.0, (0.0, f64::INFINITY))).collect();
    for (v, row) in coef.iter().enumerate().take(nvars) {
        let sp = lp.add_var(1.0, (0.0, f64::INFINITY));
        let sn = lp.add_var(1.0, (0.0, f64::INFINITY));
        let mut expr: Vec<(minilp::Variable, f64)> = vec![(sp, 1.0), (sn, -1.0)];
        for (k, &c) in row.iter().enumerate() {
            if c != 0.0 {
                expr.push((theta[k], -c));
            }
        }
        for (k, &var) in nu.iter().enumerate() {
            let g = difference_coefficient(m, k, v);
            if g != 0.0 {
                expr.push((var, g));
            }
        }
        lp.add_constraint(expr.as_slice(), ComparisonOp::Eq, 0.0);
    }
    let simplex: Vec<(minilp::Variable, f64)> = theta.iter().map(|&v| (v, 1.0)).collect();
    lp.add_constraint(simplex.as_slice(), ComparisonOp::Eq, 1.0);

    let sol = lp.solve().map_err(|e| Error::LpInfeasible(format!("saddle response: {e}")))?;
    let raw: Vec<f64> = theta.iter().map(|&v| sol[v].max(0.0)).collect();
    let mass: f64 = raw.iter().sum();
    let theta = ActionDistribution::new(raw.iter().map(|p| p / mass).collect())?;
    let value = sol.objective().max(0.0);
    if value > SADDLE_TOL {
        return Err(Error::SaddleValuePositive { value });
    }
    Ok(Response { theta, value })
}

/// Worst case of `Σ_j u_j (−Payoff_j(θ))` over `A_m`, by LP. Used to certify responses.
pub fn saddle_value(u: &[f64], theta: &ActionDistribution) -> Result<f64> {
    let m = u.len();
    if m == 1 {
        return Ok(0.0);
    }
    let coef = saddle_coefficients(u);
    let nvars = 2 * (m - 1);
    let c: Vec<f64> = coef.iter().map(|row| theta.dot(row)).collect();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let x: Vec<_> = c.iter().map(|&ci| lp.add_var(ci, (-1.0, 1.0))).collect();
    for k in 0..m - 1 {
        let expr: Vec<(minilp::Variable, f64)> = (0..nvars)
            .filter_map(|v| {
                let g = difference_coefficient(m, k, v);
                (g != 0.0).then_some((x[v], g))
            })
            .collect();
        lp.add_constraint(expr.as_slice(), ComparisonOp::Le, 0.0);
    }
    let sol = lp.solve().map_err(|e| Error::LpInfeasible(format!("saddle value: {e}")))?;
    Ok(sol.objective())
}
