use serde::{Deserialize, Serialize};

use super::{FitResult, FitResultT, Z_95};

/// Marginal effect of `x` in a model with `b1 x + b2 x²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginPoint {
    pub x: f64,
    pub effect: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// `n` evenly spaced points spanning the observed range of `values`.
pub fn observed_grid(values: &[f64], n: usize) -> Vec<f64> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    if values.is_empty() || n == 0 {
        return Vec::new();
    }
    if n == 1 || lo == hi {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// `b1 + 2 b2 x` at each grid point with a delta-method 95% interval from the
/// fit's clustered covariance. Fails if either term was dropped.
pub fn quadratic_margins(fit: &FitResult, linear: &str, squared: &str, grid: &[f64]) -> FitResultT<Vec<MarginPoint>> {
    let b1 = fit.require(linear)?.estimate;
    let b2 = fit.require(squared)?.estimate;
    let v11 = fit.covariance(linear, linear).unwrap_or(f64::NAN);
    let v22 = fit.covariance(squared, squared).unwrap_or(f64::NAN);
    let v12 = fit.covariance(linear, squared).unwrap_or(f64::NAN);
    Ok(grid
        .iter()
        .map(|&x| {
            let effect = b1 + 2.0 * b2 * x;
            let var = v11 + 4.0 * x * x * v22 + 4.0 * x * v12;
            let se = var.max(0.0).sqrt();
            MarginPoint {
                x,
                effect,
                std_error: se,
                ci_low: effect - Z_95 * se,
                ci_high: effect + Z_95 * se,
            }
        })
        .collect())
}
