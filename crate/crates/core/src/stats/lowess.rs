use serde::{Deserialize, Serialize};

use super::{StatsError, StatsResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowessOptions {
    /// Share of points in each local neighbourhood, in (0, 1].
    pub fraction: f64,
    /// Bisquare robustness passes after the initial fit.
    pub iterations: usize,
}

impl Default for LowessOptions {
    fn default() -> Self {
        Self {
            fraction: 2.0 / 3.0,
            iterations: 1,
        }
    }
}

fn tricube(u: f64) -> f64 {
    if u < 1.0 {
        let t = 1.0 - u * u * u;
        t * t * t
    } else {
        0.0
    }
}

fn bisquare(u: f64) -> f64 {
    if u.abs() < 1.0 {
        let t = 1.0 - u * u;
        t * t
    } else {
        0.0
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Locally weighted linear smoothing (tricube neighbourhood weights over the
/// `fraction·n` nearest points, bisquare robustness reweighting).
/// Returns `(x, fitted)` pairs sorted by `x`.
pub fn lowess(x: &[f64], y: &[f64], options: LowessOptions) -> StatsResult<Vec<(f64, f64)>> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::Empty("lowess needs at least 2 points".into()));
    }
    if !(options.fraction > 0.0 && options.fraction <= 1.0) {
        return Err(StatsError::Domain(format!("fraction {} outside (0, 1]", options.fraction)));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(StatsError::Domain("non-finite input".into()));
    }
    let mut pts: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    if pts[0].0 == pts[pts.len() - 1].0 {
        return Err(StatsError::DegenerateX);
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let n = xs.len();
    let k = ((options.fraction * n as f64 + 1e-10) as usize).clamp(2, n);

    let mut robust = vec![1.0; n];
    let mut fitted = vec![0.0; n];
    let mut dist = vec![0.0; n];
    let mut w = vec![0.0; n];
    for pass in 0..=options.iterations {
        for i in 0..n {
            for (d, xj) in dist.iter_mut().zip(&xs) {
                *d = (xj - xs[i]).abs();
            }
            let mut scratch = dist.clone();
            let (_, h, _) = scratch.select_nth_unstable_by(k - 1, f64::total_cmp);
            let h = *h;
            for j in 0..n {
                w[j] = robust[j] * if h > 0.0 { tricube(dist[j] / h) } else { (dist[j] == 0.0) as u8 as f64 };
            }
            let sw: f64 = w.iter().sum();
            if !(sw > 0.0) {
                fitted[i] = ys[i];
                continue;
            }
            let xm = w.iter().zip(&xs).map(|(w, x)| w * x).sum::<f64>() / sw;
            let ym = w.iter().zip(&ys).map(|(w, y)| w * y).sum::<f64>() / sw;
            let sxx: f64 = w.iter().zip(&xs).map(|(w, x)| w * (x - xm).powi(2)).sum();
            fitted[i] = if sxx > 0.0 {
                let sxy: f64 = (0..n).map(|j| w[j] * (xs[j] - xm) * (ys[j] - ym)).sum();
                ym + sxy / sxx * (xs[i] - xm)
            } else {
                ym
            };
        }
        if pass < options.iterations {
            let resid: Vec<f64> = ys.iter().zip(&fitted).map(|(y, f)| y - f).collect();
            let mut abs: Vec<f64> = resid.iter().map(|r| r.abs()).collect();
            let m = median(&mut abs);
            if m == 0.0 {
                break;
            }
            for (rw, r) in robust.iter_mut().zip(&resid) {
                *rw = bisquare(r / (6.0 * m));
            }
        }
    }
    Ok(xs.into_iter().zip(fitted).collect())
}
