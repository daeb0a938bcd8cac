use serde::{Deserialize, Serialize};

use super::{regularized_gamma_q, StatsError, StatsResult};

/// Labelled table of non-negative counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ContingencyTable {
    pub fn new(row_labels: Vec<String>, col_labels: Vec<String>, counts: Vec<Vec<u64>>) -> StatsResult<Self> {
        if counts.len() != row_labels.len() || counts.iter().any(|r| r.len() != col_labels.len()) {
            return Err(StatsError::Domain("counts do not match the label dimensions".into()));
        }
        Ok(Self {
            row_labels,
            col_labels,
            counts,
        })
    }

    /// Unlabelled table; rows and columns are numbered from 0.
    pub fn from_counts(counts: Vec<Vec<u64>>) -> StatsResult<Self> {
        let rows = counts.len();
        let cols = counts.first().map_or(0, Vec::len);
        Self::new(
            (0..rows).map(|i| i.to_string()).collect(),
            (0..cols).map(|j| j.to_string()).collect(),
            counts,
        )
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Removes rows and columns whose marginal is zero.
    pub fn without_empty_margins(&self) -> Self {
        let keep_r: Vec<usize> = (0..self.counts.len())
            .filter(|&i| self.counts[i].iter().sum::<u64>() > 0)
            .collect();
        let keep_c: Vec<usize> = (0..self.col_labels.len())
            .filter(|&j| self.counts.iter().map(|r| r[j]).sum::<u64>() > 0)
            .collect();
        Self {
            row_labels: keep_r.iter().map(|&i| self.row_labels[i].clone()).collect(),
            col_labels: keep_c.iter().map(|&j| self.col_labels[j].clone()).collect(),
            counts: keep_r
                .iter()
                .map(|&i| keep_c.iter().map(|&j| self.counts[i][j]).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Pearson chi-square test of independence.
pub fn chi_square_independence(table: &ContingencyTable) -> StatsResult<ChiSquare> {
    let r = table.counts.len();
    let c = table.col_labels.len();
    if r < 2 || c < 2 {
        return Err(StatsError::Shape { rows: r, cols: c });
    }
    let row_sums: Vec<f64> = table.counts.iter().map(|row| row.iter().sum::<u64>() as f64).collect();
    let col_sums: Vec<f64> = (0..c).map(|j| table.counts.iter().map(|row| row[j]).sum::<u64>() as f64).collect();
    if let Some(i) = row_sums.iter().position(|s| *s == 0.0) {
        return Err(StatsError::ZeroMarginal(format!("row `{}`", table.row_labels[i])));
    }
    if let Some(j) = col_sums.iter().position(|s| *s == 0.0) {
        return Err(StatsError::ZeroMarginal(format!("column `{}`", table.col_labels[j])));
    }
    let total: f64 = row_sums.iter().sum();
    let mut statistic = 0.0;
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &o) in row.iter().enumerate() {
            let e = row_sums[i] * col_sums[j] / total;
            statistic += (o as f64 - e).powi(2) / e;
        }
    }
    let df = (r - 1) * (c - 1);
    let p_value = regularized_gamma_q(df as f64 / 2.0, statistic / 2.0)?;
    Ok(ChiSquare {
        statistic,
        df,
        p_value,
    })
}
