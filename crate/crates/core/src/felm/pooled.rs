use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{fit, FitError, FitOptions, FitResult, FitResultT, Term};
use crate::features::{columns, feature_frame, FeatureRow, ModelKind};

/// Separate fits for two periods plus the stacked fit whose
/// `post_x_<variable>` coefficient is the change between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledChange {
    pub variable: String,
    pub change_term: String,
    pub before: FitResult,
    pub after: FitResult,
    pub pooled: FitResult,
}

impl PooledChange {
    pub fn change(&self) -> FitResultT<&Term> {
        self.pooled.require(&self.change_term)
    }
}

pub fn post_interaction_name(variable: &str) -> String {
    format!("post_x_{variable}")
}

fn seasons(rows: &[FeatureRow]) -> BTreeSet<i32> {
    rows.iter().map(|r| r.season).collect()
}

fn describe(s: &BTreeSet<i32>) -> String {
    match (s.first(), s.last()) {
        (Some(a), Some(b)) if a == b => a.to_string(),
        (Some(a), Some(b)) => format!("{a}-{b}"),
        _ => "empty".into(),
    }
}

/// Stacks the two periods with `post` marking the second and interacts `post`
/// with the model's variable of interest. Regressors are ordered
/// `[variable, post_x_variable, controls..., post]`; `post` itself is
/// absorbed by the game effects and is reported as dropped.
pub fn pooled_change(
    model: ModelKind,
    before: &[FeatureRow],
    after: &[FeatureRow],
    options: &FitOptions,
) -> FitResultT<PooledChange> {
    if before.is_empty() || after.is_empty() {
        return Err(FitError::Data("both periods need rows".into()));
    }
    let (sa, sb) = (seasons(before), seasons(after));
    if !sa.is_disjoint(&sb) {
        return Err(FitError::OverlappingPeriods(describe(&sa), describe(&sb)));
    }
    let base = model.spec(false);
    let variable = model.variable_of_interest().to_string();
    let change_term = post_interaction_name(&variable);

    let before_fit = fit(&base, &feature_frame(before), options)?;
    let after_fit = fit(&base, &feature_frame(after), options)?;

    let mut stacked: Vec<FeatureRow> = Vec::with_capacity(before.len() + after.len());
    stacked.extend(before.iter().cloned().map(|r| FeatureRow { post: 0.0, ..r }));
    stacked.extend(after.iter().cloned().map(|r| FeatureRow { post: 1.0, ..r }));
    let mut frame = feature_frame(&stacked);
    let var_col = frame.numeric(&variable)?.to_vec();
    let post_col = frame.numeric(columns::POST)?.to_vec();
    frame.add_numeric(&change_term, var_col.iter().zip(&post_col).map(|(v, p)| v * p).collect())?;

    let mut regressors = vec![variable.clone(), change_term.clone()];
    regressors.extend(base.regressors.iter().filter(|r| **r != variable).cloned());
    regressors.push(columns::POST.to_string());
    let pooled = fit(&base.with_regressors(regressors)?, &frame, options)?;
    pooled.require(&change_term)?;
    Ok(PooledChange {
        variable,
        change_term,
        before: before_fit,
        after: after_fit,
        pooled,
    })
}
