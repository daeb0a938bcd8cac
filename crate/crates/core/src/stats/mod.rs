//! Balance tests, rater agreement, weighted summary statistics and LOWESS.

mod balance;
mod chisq;
mod kappa;
mod lowess;
mod special;
mod summary;

use thiserror::Error;

pub use balance::{balance_table, balance_test, BalanceMode, BalanceRow, BalanceTable};
pub use chisq::{chi_square_independence, ChiSquare, ContingencyTable};
pub use kappa::{cohens_kappa, kappa_from_confusion, AgreementPair};
pub use lowess::{lowess, LowessOptions};
pub use special::{ln_gamma, regularized_gamma_p, regularized_gamma_q};
pub use summary::{summary_table, SummaryRow, SummaryTable};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("contingency table needs at least 2 rows and 2 columns, got {rows}x{cols}")]
    Shape { rows: usize, cols: usize },
    #[error("degenerate table: {0} has a zero marginal")]
    ZeroMarginal(String),
    #[error("kappa undefined: expected agreement is 1")]
    KappaUndefined,
    #[error("rater label vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("empty input: {0}")]
    Empty(String),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("degenerate x: all values equal")]
    DegenerateX,
    #[error(transparent)]
    Features(#[from] crate::features::FeatureError),
    #[error(transparent)]
    Fit(#[from] crate::felm::FitError),
}

pub type StatsResult<T> = Result<T, StatsError>;

/// Kolmogorov distance between the empirical CDF of `sample` and U(0,1).
pub fn ks_uniform_distance(sample: &[f64]) -> f64 {
    let mut s: Vec<f64> = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &p)| {
            let p = p.clamp(0.0, 1.0);
            ((i as f64 + 1.0) / n - p).max(p - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

/// Weighted mean and population-weighted standard deviation.
pub fn weighted_mean_sd(x: &[f64], w: &[f64]) -> (f64, f64) {
    let sw: f64 = w.iter().sum();
    let mean = x.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() / sw;
    let var = x.iter().zip(w).map(|(x, w)| w * (x - mean).powi(2)).sum::<f64>() / sw;
    (mean, var.sqrt())
}
