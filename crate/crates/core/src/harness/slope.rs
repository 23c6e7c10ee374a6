//! Log-log scaling slopes of regret against the horizon.

use crate::error::{Error, Result};

/// Values below this are clamped before taking logs.
pub const CLAMP: f64 = 1e-9;

/// Least-squares slope of `ln regret` against `ln T`. Needs at least four horizons; if any
/// regret is nonpositive, fails with `DegenerateFit` carrying the slope of the clamped data.
pub fn fit_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 4 {
        return Err(Error::DegenerateFit {
            reason: format!("need at least 4 horizons, got {}", points.len()),
            clamped_slope: None,
        });
    }
    if points.iter().any(|&(t, _)| !(t > 0.0) || !t.is_finite()) {
        return Err(Error::DegenerateFit { reason: "horizons must be positive".into(), clamped_slope: None });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    if xs.iter().all(|&x| (x - xs[0]).abs() < 1e-12) {
        return Err(Error::DegenerateFit { reason: "all horizons equal".into(), clamped_slope: None });
    }
    let ys: Vec<f64> = points.iter().map(|p| p.1.max(CLAMP).ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    let nonpositive = points.iter().filter(|p| !(p.1 > 0.0)).count();
    if nonpositive > 0 {
        return Err(Error::DegenerateFit {
            reason: format!("{nonpositive} nonpositive regret value(s)"),
            clamped_slope: Some(slope),
        });
    }
    Ok(slope)
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Mean and standard error (zero for a single sample).
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
