use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{FitError, FitResultT, KeyColumn};

/// Finite-sample scaling applied to each cluster sandwich.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmallSample {
    /// `G/(G-1) * (N-1)/(N-K)` per dimension, `G` that dimension's cluster count.
    #[default]
    Cgm,
    None,
}

impl SmallSample {
    fn factor(self, groups: usize, n: usize, k: usize) -> f64 {
        match self {
            SmallSample::Cgm => {
                let g = groups as f64;
                g / (g - 1.0) * (n as f64 - 1.0) / (n as f64 - k as f64)
            }
            SmallSample::None => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VcovOptions {
    pub small_sample: SmallSample,
    /// Eigenvalues below `-repair_tolerance` trigger the PSD repair.
    pub repair_tolerance: f64,
}

impl Default for VcovOptions {
    fn default() -> Self {
        Self {
            small_sample: SmallSample::Cgm,
            repair_tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClusterVcov {
    pub matrix: DMatrix<f64>,
    /// Cluster counts per dimension, then the intersection when two-way.
    pub cluster_counts: Vec<usize>,
    pub min_eigenvalue: f64,
    /// Negative eigenvalues were truncated at zero.
    pub repaired: bool,
}

fn scores_by_cluster(x: &[&[f64]], resid: &[f64], w: &[f64], codes: &[u32], groups: usize) -> DMatrix<f64> {
    let k = x.len();
    let mut s = DMatrix::zeros(groups, k);
    for i in 0..resid.len() {
        let u = w[i] * resid[i];
        let g = codes[i] as usize;
        for j in 0..k {
            s[(g, j)] += u * x[j][i];
        }
    }
    s
}

/// One-way cluster sandwich `B (Σ_g s_g s_g') B`, scaled by `factor`.
/// `x` holds the kept (possibly demeaned) columns, `bread` is `(X'WX)^-1`.
pub fn cluster_vcov(
    x: &[&[f64]],
    resid: &[f64],
    w: &[f64],
    bread: &DMatrix<f64>,
    cluster: &KeyColumn,
    small_sample: SmallSample,
) -> DMatrix<f64> {
    let s = scores_by_cluster(x, resid, w, cluster.codes(), cluster.n_groups());
    let meat = s.transpose() * &s;
    bread * meat * bread * small_sample.factor(cluster.n_groups(), resid.len(), x.len())
}

fn check_dimension(name: &str, key: &KeyColumn) -> FitResultT<()> {
    if key.n_groups() < 2 {
        return Err(FitError::DegenerateClustering(name.to_string()));
    }
    Ok(())
}

fn intersect(a: &KeyColumn, b: &KeyColumn) -> KeyColumn {
    let pairs: Vec<(u32, u32)> = a.codes().iter().copied().zip(b.codes().iter().copied()).collect();
    KeyColumn::from_labels(&pairs)
}

fn repair(matrix: DMatrix<f64>, tolerance: f64) -> (DMatrix<f64>, f64, bool) {
    let sym = (&matrix + matrix.transpose()) * 0.5;
    if sym.nrows() == 0 {
        return (sym, 0.0, false);
    }
    let eig = SymmetricEigen::new(sym.clone());
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min >= -tolerance {
        return (sym, min, false);
    }
    let clipped = eig.eigenvalues.map(|v| v.max(0.0));
    let rebuilt = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    ((&rebuilt + rebuilt.transpose()) * 0.5, min, true)
}

/// Cluster-robust covariance over one or two clustering dimensions. With two,
/// this is the Cameron–Gelbach–Miller combination `V_a + V_b - V_ab`, the
/// intersection clustered on distinct `(a, b)` pairs; any negative eigenvalues
/// are truncated and the repair flagged.
pub fn cgm_twoway_vcov(
    x: &[&[f64]],
    resid: &[f64],
    w: &[f64],
    bread: &DMatrix<f64>,
    clusters: &[(&str, &KeyColumn)],
    options: VcovOptions,
) -> FitResultT<ClusterVcov> {
    let n = resid.len();
    if w.len() != n || x.iter().any(|c| c.len() != n) {
        return Err(FitError::Data("covariance inputs differ in length".into()));
    }
    for (name, key) in clusters {
        if key.len() != n {
            return Err(FitError::Data(format!("cluster key `{name}` differs in length")));
        }
    }
    let (matrix, cluster_counts) = match clusters {
        [(name, a)] => {
            check_dimension(name, a)?;
            (cluster_vcov(x, resid, w, bread, a, options.small_sample), vec![a.n_groups()])
        }
        [(name_a, a), (name_b, b)] => {
            check_dimension(name_a, a)?;
            check_dimension(name_b, b)?;
            let ab = intersect(a, b);
            let va = cluster_vcov(x, resid, w, bread, a, options.small_sample);
            let vb = cluster_vcov(x, resid, w, bread, b, options.small_sample);
            let vab = cluster_vcov(x, resid, w, bread, &ab, options.small_sample);
            (va + vb - vab, vec![a.n_groups(), b.n_groups(), ab.n_groups()])
        }
        _ => return Err(FitError::Spec("one or two cluster dimensions required".into())),
    };
    let (matrix, min_eigenvalue, repaired) = repair(matrix, options.repair_tolerance);
    Ok(ClusterVcov {
        matrix,
        cluster_counts,
        min_eigenvalue,
        repaired,
    })
}
