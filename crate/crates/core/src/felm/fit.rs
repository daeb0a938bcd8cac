use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::absorb::{AbsorbOptions, Demeaner};
use super::vcov::{cgm_twoway_vcov, VcovOptions};
use super::wls::wls_fit_with;
use super::{FitError, FitResultT, Frame, KeyColumn};
use crate::stats::regularized_gamma_q;

/// Two-sided 95% normal critical value.
pub const Z_95: f64 = 1.96;

/// Relative threshold for the collinearity screen inside [`fit`]. Columns are
/// judged against their weighted norm *before* absorption, so a main effect
/// swallowed by the fixed effects (left with only projection round-off of
/// order the absorption tolerance) is dropped while any regressor with real
/// within-group variation survives.
pub const FIT_COLLINEARITY_TOL: f64 = 1e-8;

/// What to regress on what, which fixed effects to absorb and how to cluster.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub response: String,
    pub regressors: Vec<String>,
    pub absorb: Vec<String>,
    pub weights: String,
    pub clusters: Vec<String>,
}

impl ModelSpec {
    pub fn new(
        response: impl Into<String>,
        regressors: Vec<String>,
        absorb: Vec<String>,
        weights: impl Into<String>,
        clusters: Vec<String>,
    ) -> FitResultT<Self> {
        let spec = Self {
            response: response.into(),
            regressors,
            absorb,
            weights: weights.into(),
            clusters,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> FitResultT<()> {
        let bad = |m: &str| Err(FitError::Spec(m.to_string()));
        if self.regressors.is_empty() {
            return bad("no regressors");
        }
        for (i, r) in self.regressors.iter().enumerate() {
            if self.regressors[..i].contains(r) {
                return Err(FitError::Spec(format!("regressor `{r}` listed twice")));
            }
        }
        if !(1..=2).contains(&self.absorb.len()) {
            return bad("one or two absorbed dimensions required");
        }
        if !(1..=2).contains(&self.clusters.len()) {
            return bad("one or two cluster dimensions required");
        }
        if self.absorb.len() == 2 && self.absorb[0] == self.absorb[1] {
            return bad("absorbed dimensions must differ");
        }
        if self.clusters.len() == 2 && self.clusters[0] == self.clusters[1] {
            return bad("cluster dimensions must differ");
        }
        Ok(())
    }

    pub fn with_regressors(&self, regressors: Vec<String>) -> FitResultT<Self> {
        Self::new(
            self.response.clone(),
            regressors,
            self.absorb.clone(),
            self.weights.clone(),
            self.clusters.clone(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub absorb: AbsorbOptions,
    pub collinearity_tolerance: f64,
    pub vcov: VcovOptions,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            absorb: AbsorbOptions::default(),
            collinearity_tolerance: FIT_COLLINEARITY_TOL,
            vcov: VcovOptions::default(),
        }
    }
}

/// One estimated coefficient with its normal-theory inference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub z: f64,
    pub p_value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Term {
    pub fn new(name: impl Into<String>, estimate: f64, variance: f64) -> Self {
        let std_error = variance.max(0.0).sqrt();
        let z = if std_error > 0.0 { estimate / std_error } else { f64::NAN };
        Self {
            name: name.into(),
            estimate,
            std_error,
            z,
            p_value: normal_two_sided_p(z),
            ci_low: estimate - Z_95 * std_error,
            ci_high: estimate + Z_95 * std_error,
        }
    }

    pub fn covers(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }
}

/// `P(|Z| > |z|)` for standard normal `Z`; NaN for NaN input.
pub fn normal_two_sided_p(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    regularized_gamma_q(0.5, 0.5 * z * z).unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub spec: ModelSpec,
    /// Kept regressors in spec order.
    pub terms: Vec<Term>,
    /// Regressors dropped as collinear with earlier ones or the fixed effects.
    pub dropped: Vec<String>,
    /// Covariance over `terms`, row-major.
    pub vcov: Vec<Vec<f64>>,
    pub n_obs: usize,
    pub n_dropped_collinear: usize,
    /// Weighted mean of the response.
    pub sample_mean: f64,
    /// Cluster counts keyed by dimension name (`a*b` for the intersection).
    pub cluster_counts: BTreeMap<String, usize>,
    /// Fixed-effect group counts keyed by dimension name.
    pub fe_groups: BTreeMap<String, usize>,
    pub vcov_repaired: bool,
    pub min_eigenvalue: f64,
    pub absorb_sweeps: usize,
}

impl FitResult {
    pub fn term(&self, name: &str) -> Option<&Term> {
        self.terms.iter().find(|t| t.name == name)
    }

    pub fn require(&self, name: &str) -> FitResultT<&Term> {
        if self.dropped.iter().any(|d| d == name) {
            return Err(FitError::TermDropped(name.to_string()));
        }
        self.term(name).ok_or_else(|| FitError::UnknownColumn(name.to_string()))
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.term(name).map(|t| t.estimate)
    }

    pub fn std_error(&self, name: &str) -> Option<f64> {
        self.term(name).map(|t| t.std_error)
    }

    pub fn covariance(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.terms.iter().position(|t| t.name == a)?;
        let j = self.terms.iter().position(|t| t.name == b)?;
        Some(self.vcov[i][j])
    }
}

fn weighted_norm(col: &[f64], w: &[f64]) -> f64 {
    col.iter().zip(w).map(|(x, w)| w * x * x).sum::<f64>().sqrt()
}

/// Absorbs the fixed effects, drops collinear regressors, solves the weighted
/// least-squares problem and attaches the clustered covariance.
pub fn fit(spec: &ModelSpec, frame: &Frame, options: &FitOptions) -> FitResultT<FitResult> {
    spec.validate()?;
    let n = frame.n_rows();
    if n == 0 {
        return Err(FitError::Data("empty frame".into()));
    }
    let w = frame.numeric(&spec.weights)?;
    let y_raw = frame.numeric(&spec.response)?;
    let x_raw: Vec<&[f64]> = spec
        .regressors
        .iter()
        .map(|r| frame.numeric(r))
        .collect::<FitResultT<_>>()?;
    let absorb: Vec<&KeyColumn> = spec.absorb.iter().map(|a| frame.key(a)).collect::<FitResultT<_>>()?;
    let clusters: Vec<(&str, &KeyColumn)> = spec
        .clusters
        .iter()
        .map(|c| frame.key(c).map(|k| (c.as_str(), k)))
        .collect::<FitResultT<_>>()?;
    if y_raw.iter().chain(x_raw.iter().copied().flatten()).any(|v| !v.is_finite()) {
        return Err(FitError::Data("non-finite value in response or regressors".into()));
    }

    let demeaner = Demeaner::new(&absorb, w, options.absorb)?;
    let sum_w: f64 = w.iter().sum();
    let sample_mean = y_raw.iter().zip(w).map(|(y, w)| y * w).sum::<f64>() / sum_w;
    let reference: Vec<f64> = x_raw.iter().map(|c| weighted_norm(c, w)).collect();

    let mut y = y_raw.to_vec();
    let (mut sweeps, _) = demeaner.demean(&mut y)?;
    let mut x: Vec<Vec<f64>> = Vec::with_capacity(x_raw.len());
    for col in &x_raw {
        let mut c = col.to_vec();
        let (s, _) = demeaner.demean(&mut c)?;
        sweeps = sweeps.max(s);
        x.push(c);
    }

    let wls = wls_fit_with(&x, &y, w, options.collinearity_tolerance, Some(&reference))?;
    let kept_cols: Vec<&[f64]> = wls.kept.iter().map(|&j| x[j].as_slice()).collect();
    let vc = cgm_twoway_vcov(&kept_cols, &wls.residuals, w, &wls.bread, &clusters, options.vcov)?;

    let terms = wls
        .kept
        .iter()
        .enumerate()
        .map(|(i, &j)| Term::new(spec.regressors[j].clone(), wls.coefficients[i], vc.matrix[(i, i)]))
        .collect();
    let k = wls.kept.len();
    let vcov = (0..k).map(|i| (0..k).map(|j| vc.matrix[(i, j)]).collect()).collect();
    let mut cluster_counts = BTreeMap::new();
    for ((name, _), count) in clusters.iter().zip(&vc.cluster_counts) {
        cluster_counts.insert(name.to_string(), *count);
    }
    if clusters.len() == 2 {
        cluster_counts.insert(format!("{}*{}", clusters[0].0, clusters[1].0), vc.cluster_counts[2]);
    }
    let fe_groups = spec
        .absorb
        .iter()
        .zip(&absorb)
        .map(|(name, key)| (name.clone(), key.n_groups()))
        .collect();
    Ok(FitResult {
        spec: spec.clone(),
        terms,
        dropped: wls.dropped.iter().map(|&j| spec.regressors[j].clone()).collect(),
        vcov,
        n_obs: n,
        n_dropped_collinear: wls.dropped.len(),
        sample_mean,
        cluster_counts,
        fe_groups,
        vcov_repaired: vc.repaired,
        min_eigenvalue: vc.min_eigenvalue,
        absorb_sweeps: sweeps,
    })
}
