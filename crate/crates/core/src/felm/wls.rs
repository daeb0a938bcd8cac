use nalgebra::{DMatrix, DVector};

use super::{FitError, FitResultT};

/// Default relative threshold below which a column counts as a linear
/// combination of the columns before it.
pub const DEFAULT_COLLINEARITY_TOL: f64 = 1e-10;

/// Weighted least-squares solution over the kept columns.
#[derive(Debug, Clone)]
pub struct WlsFit {
    /// Coefficients in the order of `kept`.
    pub coefficients: Vec<f64>,
    /// Indices of the input columns that entered the solve.
    pub kept: Vec<usize>,
    /// Indices of the input columns dropped as collinear.
    pub dropped: Vec<usize>,
    /// Unweighted residuals `y - X b`.
    pub residuals: Vec<f64>,
    /// `(X' W X)^-1` over the kept columns.
    pub bread: DMatrix<f64>,
}

impl WlsFit {
    pub fn n_obs(&self) -> usize {
        self.residuals.len()
    }

    pub fn n_kept(&self) -> usize {
        self.kept.len()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Walks the columns in order and keeps each one whose component orthogonal
/// to the already-kept columns has norm above `tol * reference[j]`.
/// Gram–Schmidt with one reorthogonalization pass keeps the residual norms
/// accurate to working precision.
fn select_columns(scaled: &[Vec<f64>], reference: &[f64], tol: f64) -> (Vec<usize>, Vec<usize>) {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (j, col) in scaled.iter().enumerate() {
        let mut v = col.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let r = norm(&v);
        if reference[j] > 0.0 && r > tol * reference[j] {
            for vi in v.iter_mut() {
                *vi /= r;
            }
            basis.push(v);
            kept.push(j);
        } else {
            dropped.push(j);
        }
    }
    (kept, dropped)
}

/// Weighted least squares of `y` on the columns of `x`, dropping columns that
/// are collinear with earlier ones (first-listed kept).
pub fn wls_fit(x: &[Vec<f64>], y: &[f64], w: &[f64]) -> FitResultT<WlsFit> {
    wls_fit_with(x, y, w, DEFAULT_COLLINEARITY_TOL, None)
}

/// As [`wls_fit`], with an explicit relative tolerance and optional
/// reference norms for the collinearity test. Without reference norms each
/// column is judged against its own weighted norm.
pub fn wls_fit_with(
    x: &[Vec<f64>],
    y: &[f64],
    w: &[f64],
    tol: f64,
    reference_norms: Option<&[f64]>,
) -> FitResultT<WlsFit> {
    let n = y.len();
    if w.len() != n || x.iter().any(|c| c.len() != n) {
        return Err(FitError::Data("design, response and weights differ in length".into()));
    }
    if let Some(bad) = w.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(FitError::Data(format!("weights must be positive, found {bad}")));
    }
    if y.iter().chain(x.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(FitError::Data("non-finite value in design or response".into()));
    }
    let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let scaled: Vec<Vec<f64>> = x
        .iter()
        .map(|c| c.iter().zip(&sw).map(|(a, s)| a * s).collect())
        .collect();
    let own_norms: Vec<f64>;
    let reference = match reference_norms {
        Some(r) => {
            if r.len() != x.len() {
                return Err(FitError::Data("one reference norm per column required".into()));
            }
            r
        }
        None => {
            own_norms = scaled.iter().map(|c| norm(c)).collect();
            &own_norms
        }
    };
    let (kept, dropped) = select_columns(&scaled, reference, tol);
    if kept.is_empty() {
        return Err(FitError::NoKeptColumns);
    }
    let k = kept.len();
    if n < k {
        return Err(FitError::TooFewRows { rows: n, columns: k });
    }
    let xs = DMatrix::from_fn(n, k, |i, j| scaled[kept[j]][i]);
    let ys = DVector::from_iterator(n, y.iter().zip(&sw).map(|(a, s)| a * s));
    let qr = xs.qr();
    let r = qr.r();
    let qty = qr.q().transpose() * &ys;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| FitError::Data("singular design after collinearity screening".into()))?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| FitError::Data("singular design after collinearity screening".into()))?;
    let bread = &r_inv * r_inv.transpose();
    let residuals = (0..n)
        .map(|i| y[i] - kept.iter().enumerate().map(|(j, &c)| x[c][i] * beta[j]).sum::<f64>())
        .collect();
    Ok(WlsFit {
        coefficients: beta.iter().copied().collect(),
        kept,
        dropped,
        residuals,
        bread: (&bread + bread.transpose()) * 0.5,
    })
}
