//! Weighted least squares with absorbed fixed effects and cluster-robust
//! covariance.
//!
//! Fixed effects are removed by weighted alternating projections; slopes then
//! come from WLS on the demeaned data (Frisch–Waugh–Lovell). Inference uses
//! the Cameron–Gelbach–Miller two-way cluster sandwich.

mod absorb;
mod fit;
mod frame;
mod margins;
mod pooled;
mod referee;
mod table;
mod vcov;
mod wls;

use thiserror::Error;

pub use absorb::{absorb_fixed_effects, AbsorbOptions, AbsorbReport, Demeaner};
pub use fit::{fit, normal_two_sided_p, FitOptions, FitResult, ModelSpec, Term, FIT_COLLINEARITY_TOL, Z_95};
pub use frame::{Frame, KeyColumn};
pub use margins::{observed_grid, quadratic_margins, MarginPoint};
pub use pooled::{post_interaction_name, pooled_change, PooledChange};
pub use referee::{
    per_referee_fit, per_referee_roster, PerRefereeOptions, RefereeDesign, RefereeEstimate,
    RefereeRoster, RefereeSkip, TeamPerformance, REFEREE_X_DISTANCE,
};
pub use table::{render_table, stars, term_label, TableColumn};
pub use vcov::{cgm_twoway_vcov, cluster_vcov, ClusterVcov, SmallSample, VcovOptions};
pub use wls::{wls_fit, wls_fit_with, WlsFit, DEFAULT_COLLINEARITY_TOL};

#[derive(Debug, Error)]
pub enum FitError {
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("column `{name}` has {got} rows, frame has {expected}")]
    Length {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("invalid model spec: {0}")]
    Spec(String),
    #[error("invalid data: {0}")]
    Data(String),
    #[error("fixed-effect absorption did not converge after {sweeps} sweeps (last change {change:e})")]
    NoConvergence { sweeps: usize, change: f64 },
    #[error("no regressors left after dropping collinear columns")]
    NoKeptColumns,
    #[error("{rows} observations cannot identify {columns} coefficients")]
    TooFewRows { rows: usize, columns: usize },
    #[error("degenerate clustering: dimension `{0}` has a single cluster")]
    DegenerateClustering(String),
    #[error("term `{0}` was dropped as collinear")]
    TermDropped(String),
    #[error("periods overlap: {0} and {1}")]
    OverlappingPeriods(String, String),
    #[error(transparent)]
    Features(#[from] crate::features::FeatureError),
}

pub type FitResultT<T> = Result<T, FitError>;
