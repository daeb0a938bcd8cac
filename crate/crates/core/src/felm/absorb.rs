use super::{FitError, FitResultT, KeyColumn};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AbsorbOptions {
    /// Converged once no group mean removed during a sweep exceeds this.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for AbsorbOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_sweeps: 10_000,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AbsorbReport {
    /// Largest sweep count over the demeaned columns.
    pub sweeps: usize,
    /// Largest final-sweep change over the demeaned columns.
    pub max_change: f64,
}

/// Weighted group-demeaning operators for one or more fixed-effect dimensions.
#[derive(Debug, Clone)]
pub struct Demeaner<'a> {
    dims: Vec<&'a [u32]>,
    weights: &'a [f64],
    group_weight: Vec<Vec<f64>>,
    options: AbsorbOptions,
}

impl<'a> Demeaner<'a> {
    pub fn new(dims: &[&'a KeyColumn], weights: &'a [f64], options: AbsorbOptions) -> FitResultT<Self> {
        if dims.is_empty() {
            return Err(FitError::Spec("at least one fixed-effect dimension is required".into()));
        }
        if let Some(bad) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(FitError::Data(format!("weights must be positive, found {bad}")));
        }
        let mut group_weight = Vec::with_capacity(dims.len());
        for dim in dims {
            if dim.len() != weights.len() {
                return Err(FitError::Data("fixed-effect key length differs from weights".into()));
            }
            let mut gw = vec![0.0; dim.n_groups()];
            for (&g, &w) in dim.codes().iter().zip(weights) {
                gw[g as usize] += w;
            }
            group_weight.push(gw);
        }
        Ok(Self {
            dims: dims.iter().map(|d| d.codes()).collect(),
            weights,
            group_weight,
            options,
        })
    }

    // Removes the weighted group means of one dimension; returns the largest
    // absolute mean and the weighted sum of squared means.
    fn project(&self, dim: usize, column: &mut [f64], sums: &mut Vec<f64>) -> (f64, f64) {
        let codes = self.dims[dim];
        let gw = &self.group_weight[dim];
        sums.clear();
        sums.resize(gw.len(), 0.0);
        for ((&g, &w), &v) in codes.iter().zip(self.weights).zip(column.iter()) {
            sums[g as usize] += w * v;
        }
        let mut max_abs: f64 = 0.0;
        let mut ss = 0.0;
        for (s, &w) in sums.iter_mut().zip(gw) {
            *s /= w;
            max_abs = max_abs.max(s.abs());
            ss += w * *s * *s;
        }
        for (&g, v) in codes.iter().zip(column.iter_mut()) {
            *v -= sums[g as usize];
        }
        (max_abs, ss)
    }

    /// Demeans one column in place, returning the sweep count and final change.
    pub fn demean(&self, column: &mut [f64]) -> FitResultT<(usize, f64)> {
        self.demean_traced(column, None)
    }

    /// As [`Demeaner::demean`], also recording the weighted sum of squared
    /// group means removed by every projection.
    pub fn demean_traced(
        &self,
        column: &mut [f64],
        mut trace: Option<&mut Vec<f64>>,
    ) -> FitResultT<(usize, f64)> {
        let mut sums = Vec::new();
        let mut change = f64::INFINITY;
        for sweep in 1..=self.options.max_sweeps {
            change = 0.0;
            for dim in 0..self.dims.len() {
                let (max_abs, ss) = self.project(dim, column, &mut sums);
                change = change.max(max_abs);
                if let Some(t) = trace.as_deref_mut() {
                    t.push(ss);
                }
            }
            if change < self.options.tolerance {
                return Ok((sweep, change));
            }
            // A single dimension is an exact projection.
            if self.dims.len() == 1 && sweep >= 2 {
                return Ok((sweep, change));
            }
        }
        Err(FitError::NoConvergence {
            sweeps: self.options.max_sweeps,
            change,
        })
    }
}

/// Demeans every column in place over the given fixed-effect dimensions by
/// weighted alternating projections.
pub fn absorb_fixed_effects(
    columns: &mut [Vec<f64>],
    weights: &[f64],
    dims: &[&KeyColumn],
    options: AbsorbOptions,
) -> FitResultT<AbsorbReport> {
    let demeaner = Demeaner::new(dims, weights, options)?;
    let mut report = AbsorbReport::default();
    for col in columns.iter_mut() {
        if col.len() != weights.len() {
            return Err(FitError::Data("column length differs from weights".into()));
        }
        let (sweeps, change) = demeaner.demean(col)?;
        report.sweeps = report.sweeps.max(sweeps);
        report.max_change = report.max_change.max(change);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimension_one_group() {
        let key = KeyColumn::from_labels(&[0, 0]);
        let mut cols = vec![vec![1.0, 3.0]];
        absorb_fixed_effects(&mut cols, &[1.0, 1.0], &[&key], AbsorbOptions::default()).unwrap();
        assert_eq!(cols[0], vec![-1.0, 1.0]);
    }

    #[test]
    fn weighted_mean_removed() {
        let key = KeyColumn::from_labels(&[0, 0]);
        let mut cols = vec![vec![1.0, 4.0]];
        absorb_fixed_effects(&mut cols, &[2.0, 1.0], &[&key], AbsorbOptions::default()).unwrap();
        assert_eq!(cols[0], vec![-1.0, 2.0]);
    }

    #[test]
    fn sums_of_group_constants_vanish() {
        let a = KeyColumn::from_labels(&[0, 0, 1, 1, 2, 2, 0, 1]);
        let b = KeyColumn::from_labels(&[0, 1, 0, 1, 0, 1, 2, 2]);
        let fa = [1.5, -2.0, 0.25];
        let fb = [3.0, 7.0, -1.0];
        let mut cols = vec![a
            .codes()
            .iter()
            .zip(b.codes())
            .map(|(&i, &j)| fa[i as usize] + fb[j as usize])
            .collect::<Vec<_>>()];
        let w = [1.0, 2.0, 0.5, 1.0, 3.0, 1.0, 2.0, 1.5];
        absorb_fixed_effects(&mut cols, &w, &[&a, &b], AbsorbOptions::default()).unwrap();
        assert!(cols[0].iter().all(|v| v.abs() < 1e-9), "{:?}", cols[0]);
    }

    #[test]
    fn non_convergence_reports_sweeps() {
        let a = KeyColumn::from_labels(&[0, 0, 1, 1]);
        let b = KeyColumn::from_labels(&[0, 1, 0, 1]);
        let mut cols = vec![vec![1.0, 5.0, -2.0, 9.0]];
        let opts = AbsorbOptions {
            tolerance: 0.0,
            max_sweeps: 3,
        };
        match absorb_fixed_effects(&mut cols, &[1.0, 2.0, 3.0, 4.0], &[&a, &b], opts) {
            Err(FitError::NoConvergence { sweeps, .. }) => assert_eq!(sweeps, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_nonpositive_weights() {
        let a = KeyColumn::from_labels(&[0, 1]);
        let mut cols = vec![vec![1.0, 2.0]];
        assert!(absorb_fixed_effects(&mut cols, &[1.0, 0.0], &[&a], AbsorbOptions::default()).is_err());
    }
}
