//! Online linear optimisation over `K = {w ≤ 0, ‖w‖₂ ≤ 1}` by follow-the-regularised-leader
//! with the ℓq regulariser `R(w) = ½‖w‖_q²`.

/// Iteration cap of the projected-gradient inner solver.
pub const MAX_ITERS: usize = 1000;
/// Tolerance on the unit-step projected-gradient residual of the inner solver.
pub const SOLVER_TOL: f64 = 1e-8;

/// `ln d`, floored at `ln 2` so that one-dimensional problems stay well defined.
pub fn ln_dim(d: usize) -> f64 {
    (d.max(2) as f64).ln()
}

/// Regulariser exponent: `ln d / (ln d − 1)` once that lies in `(1, 2]`, i.e. for `ln d ≥ 2`; else 2.
pub fn q_exponent(d: usize) -> f64 {
    let l = ln_dim(d);
    if l >= 2.0 {
        l / (l - 1.0)
    } else {
        2.0
    }
}

/// Learning rate `√(2μ)/(D_p √T)` with strong-convexity modulus `μ = 1/(3 ln d)`.
pub fn learning_rate(d: usize, payoff_diameter: f64, horizon: usize) -> f64 {
    let mu = 1.0 / (3.0 * ln_dim(d));
    (2.0 * mu).sqrt() / (payoff_diameter * (horizon.max(1) as f64).sqrt())
}

/// Euclidean projection onto `K`: clamp to the negative orthant, then scale into the unit ball.
pub fn project_k(x: &[f64]) -> Vec<f64> {
    let mut y: Vec<f64> = x.iter().map(|v| v.min(0.0)).collect();
    scale_into_ball(&mut y);
    y
}

fn scale_into_ball(y: &mut [f64]) {
    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 1.0 {
        y.iter_mut().for_each(|v| *v /= norm);
    }
}

fn q_norm(x: &[f64], q: f64) -> f64 {
    x.iter().map(|v| v.abs().powf(q)).sum::<f64>().powf(1.0 / q)
}

/// Outcome of one FTRL solve.
#[derive(Clone, Debug)]
pub struct FtrlSolution {
    /// The minimiser, a point of `K`.
    pub w: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// `argmin_{w∈K} ⟨L, w⟩ + R(w)/η`.
///
/// Works in `x = −w ≥ 0`. Coordinates with `L_j ≤ 0` are zero at the optimum. For `q = 2` the
/// answer is the projection of `−ηL`; otherwise the unconstrained orthant minimiser
/// `η‖g‖_p^{2−p} g^{p−1}` (`g = L⁺`, `p` the dual exponent) is returned when it lies in the ball,
/// and projected gradient descent with backtracking runs when it does not. `warm` is a previous
/// solution used as a starting point.
pub fn ftrl_argmin(cum_loss: &[f64], eta: f64, q: f64, warm: Option<&[f64]>) -> FtrlSolution {
    let d = cum_loss.len();
    let g: Vec<f64> = cum_loss.iter().map(|v| v.max(0.0)).collect();
    if g.iter().all(|&v| v == 0.0) {
        return FtrlSolution { w: vec![0.0; d], iterations: 0, converged: true };
    }
    if q >= 2.0 {
        let mut w: Vec<f64> = g.iter().map(|v| -eta * v).collect();
        scale_into_ball(&mut w);
        return FtrlSolution { w, iterations: 0, converged: true };
    }

    let p = q / (q - 1.0);
    let g_norm = q_norm(&g, p);
    let scale = eta * g_norm.powf(2.0 - p);
    let x0: Vec<f64> = g.iter().map(|v| scale * v.powf(p - 1.0)).collect();
    if x0.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
        return FtrlSolution { w: x0.iter().map(|v| -v).collect(), iterations: 0, converged: true };
    }

    let support: Vec<usize> = (0..d).filter(|&j| g[j] > 0.0).collect();
    let gs: Vec<f64> = support.iter().map(|&j| eta * g[j]).collect();
    let objective = |x: &[f64]| -> f64 {
        let lin: f64 = gs.iter().zip(x).map(|(a, b)| a * b).sum();
        let n = q_norm(x, q);
        0.5 * n * n - lin
    };
    let project = |x: &mut [f64]| {
        x.iter_mut().for_each(|v| *v = v.max(0.0));
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1.0 {
            x.iter_mut().for_each(|v| *v /= norm);
        }
    };

    let mut x: Vec<f64> = support.iter().map(|&j| x0[j]).collect();
    project(&mut x);
    let mut fx = objective(&x);
    if let Some(prev) = warm {
        let mut xw: Vec<f64> = support.iter().map(|&j| (-prev[j]).max(0.0)).collect();
        project(&mut xw);
        let fw = objective(&xw);
        if fw < fx {
            x = xw;
            fx = fw;
        }
    }

    let mut step = 1.0;
    let mut converged = false;
    let mut iterations = 0;
    let mut grad = vec![0.0; x.len()];
    let mut trial = vec![0.0; x.len()];
    while iterations < MAX_ITERS {
        iterations += 1;
        let n = q_norm(&x, q);
        let c = if n > 0.0 { n.powf(2.0 - q) } else { 0.0 };
        for k in 0..x.len() {
            grad[k] = c * x[k].powf(q - 1.0) - gs[k];
        }
        // Stationarity: the unit-step projected gradient leaves x in place.
        for k in 0..x.len() {
            trial[k] = x[k] - grad[k];
        }
        project(&mut trial);
        let residual = x.iter().zip(&trial).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if residual <= SOLVER_TOL {
            converged = true;
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            for k in 0..x.len() {
                trial[k] = x[k] - step * grad[k];
            }
            project(&mut trial);
            let mut lin = 0.0;
            let mut sq = 0.0;
            for k in 0..x.len() {
                let dk = trial[k] - x[k];
                lin += grad[k] * dk;
                sq += dk * dk;
            }
            let ft = objective(&trial);
            if ft <= fx + lin + sq / (2.0 * step) + 1e-15 {
                accepted = true;
                std::mem::swap(&mut x, &mut trial);
                fx = ft;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // No representable decrease left: x is optimal to machine precision.
            converged = true;
            break;
        }
        step *= 2.0;
    }
    if !converged {
        log::warn!("ftrl inner solver stopped after {iterations} iterations without converging");
    }

    let mut w = vec![0.0; d];
    for (k, &j) in support.iter().enumerate() {
        w[j] = -x[k];
    }
    FtrlSolution { w, iterations, converged }
}
