//! Efficiency scoring of decision making units with the Kourosh and Arash
//! Method (KAM) under variable returns to scale, and outlier detection built
//! on its scores.
//!
//! ```
//! use kam_core::{detect, DetectorThresholds, Dmu, KamConfig, Sample};
//!
//! let sample = Sample::new(vec![
//!     Dmu::new("A", vec![2.0], vec![7.0])?,
//!     Dmu::new("B", vec![10.0], vec![7.1])?,
//! ])?;
//! let report = detect(&sample, &KamConfig::default(), &DetectorThresholds::default(), false)?;
//! assert_eq!(report.outlier_ids(), vec!["B"]);
//! # Ok::<(), kam_core::KamError>(())
//! ```

pub mod datagen;
pub mod detector;
pub mod engine;
pub mod error;
pub mod lp;
pub mod types;

pub use datagen::{generate, Label, LabeledSample, ScenarioSpec};
pub use detector::{
    detect, detect_with, evaluate_sample, flag_outliers, DetectOptions, DetectorThresholds,
    DiagnosticEntry, DiagnosticSeries, OutlierFlags, OutlierReport, SpreadBasis,
};
pub use engine::{
    classify_efficiency, compute_scores, compute_targets, evaluate_dmu, solve_linear_kam,
    solve_nonlinear_kam, DmuEvaluation, EfficiencyClass, EfficiencyKind, KamOutcome, KamScores,
    KamSolution, KamTargets, TargetPoint,
};
pub use error::{ErrorCategory, KamError};
pub use lp::{solve_lp, LinearProgram, LpError, LpSolution, LpStatus, Sense};
pub use types::{
    resolve_epsilon, resolve_weights, DeltaRule, Dmu, EpsilonScheme, KamConfig, Sample,
    WeightScheme,
};
