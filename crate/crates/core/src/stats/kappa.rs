use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{StatsError, StatsResult};

/// Two raters' labels over the same subjects.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementPair {
    pub rater_a: Vec<String>,
    pub rater_b: Vec<String>,
}

impl AgreementPair {
    pub fn new(rater_a: Vec<String>, rater_b: Vec<String>) -> StatsResult<Self> {
        if rater_a.len() != rater_b.len() {
            return Err(StatsError::LengthMismatch(rater_a.len(), rater_b.len()));
        }
        if rater_a.is_empty() {
            return Err(StatsError::Empty("no rated subjects".into()));
        }
        Ok(Self { rater_a, rater_b })
    }

    /// Shared category set, sorted.
    pub fn categories(&self) -> Vec<String> {
        let mut c: Vec<String> = self.rater_a.iter().chain(&self.rater_b).cloned().collect();
        c.sort();
        c.dedup();
        c
    }

    /// Confusion matrix over [`AgreementPair::categories`]; rows are rater A.
    pub fn confusion(&self) -> Vec<Vec<f64>> {
        let cats = self.categories();
        let index: BTreeMap<&str, usize> = cats.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        let mut m = vec![vec![0.0; cats.len()]; cats.len()];
        for (a, b) in self.rater_a.iter().zip(&self.rater_b) {
            m[index[a.as_str()]][index[b.as_str()]] += 1.0;
        }
        m
    }
}

/// Cohen's kappa from a square confusion matrix (rows: rater A).
pub fn kappa_from_confusion(m: &[Vec<f64>]) -> StatsResult<f64> {
    let k = m.len();
    if k == 0 || m.iter().any(|r| r.len() != k) {
        return Err(StatsError::Domain("confusion matrix must be square and non-empty".into()));
    }
    let total: f64 = m.iter().flatten().sum();
    if !(total > 0.0) {
        return Err(StatsError::Empty("confusion matrix has no subjects".into()));
    }
    let p_o = (0..k).map(|i| m[i][i]).sum::<f64>() / total;
    let p_e = (0..k)
        .map(|i| {
            let row: f64 = m[i].iter().sum();
            let col: f64 = m.iter().map(|r| r[i]).sum();
            row * col
        })
        .sum::<f64>()
        / (total * total);
    if p_e >= 1.0 {
        return Err(StatsError::KappaUndefined);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

pub fn cohens_kappa(pair: &AgreementPair) -> StatsResult<f64> {
    kappa_from_confusion(&pair.confusion())
}
