//! Skin-tone measurement and panel econometrics for referee-bias studies.
//!
//! The crate is split along the analysis flow:
//!
//! - [`color`]: headshot raster to a representative CIELAB tone.
//! - [`panel`]: player-game panel ingestion and validation.
//! - [`features`]: foul rates, crew composition and crew distance regressors.
//! - [`felm`]: weighted least squares with absorbed fixed effects and
//!   two-way cluster-robust inference.
//! - [`stats`]: balance tests, rater agreement, summary tables, LOWESS.
//! - [`sim`]: synthetic panels with planted effects.

pub mod color;
pub mod features;
pub mod felm;
pub mod panel;
pub mod sim;
pub mod stats;

pub use color::{measure_image, LabTone, RgbImage};
pub use features::{FeatureRow, ModelKind, RaceSource, SeasonRange};
pub use felm::{fit, FitOptions, FitResult, Frame, ModelSpec};
pub use panel::Panel;
