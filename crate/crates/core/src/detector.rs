//! Whole-sample diagnostics and the four outlier cases.
//!
//! Every DMU is scored twice, at zero epsilon and at the configured epsilon.
//! The resulting series, sorted by the zero-epsilon score, is what the
//! polygon-chart export draws. A DMU is an outlier when any of these hold:
//!
//! 1. its zero-epsilon score stands out (z-score) from the sample's,
//! 2. its epsilon best technical score stands out from the sample's,
//! 3. its score drops by a large relative amount between the two runs,
//! 4. it is technically efficient and its targets are spread widely
//!    (small sensitivity `S`, thresholded through `1/S`).
//!
//! An optional second pass removes the flagged DMUs and repeats the analysis
//! on what remains.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::{evaluate_dmu, DmuEvaluation};
use crate::error::{KamError, Result};
use crate::types::{KamConfig, Sample};

// Dispersion below this counts as zero.
const MIN_SPREAD: f64 = 1e-12;

/// How far from the bulk of the sample a score must sit to count as
/// "much greater".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpreadBasis {
    /// Classical z-score: `(v - mean) / population standard deviation`.
    StandardDeviation,
    /// Robust z-score: `(v - median) / (1.4826 * MAD)`.
    MedianAbsoluteDeviation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorThresholds {
    pub z_much_greater: f64,
    pub drop_moderate: f64,
    /// Applied to `1/S`.
    pub sensitivity_cut: f64,
    pub spread: SpreadBasis,
}

impl Default for DetectorThresholds {
    fn default() -> Self {
        Self {
            z_much_greater: 2.0,
            drop_moderate: 0.5,
            sensitivity_cut: 2.0,
            spread: SpreadBasis::StandardDeviation,
        }
    }
}

impl DetectorThresholds {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.z_much_greater) {
            return Err(KamError::Config("z threshold must be positive".into()));
        }
        if !(positive(self.drop_moderate) && self.drop_moderate < 1.0) {
            return Err(KamError::Config("drop threshold must lie in (0, 1)".into()));
        }
        if !(self.sensitivity_cut.is_finite() && self.sensitivity_cut >= 1.0) {
            return Err(KamError::Config(
                "sensitivity cut must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticEntry {
    pub id: String,
    pub evaluation: DmuEvaluation,
}

impl DiagnosticEntry {
    pub fn ka_zero(&self) -> f64 {
        self.evaluation.zero.scores.ka_star
    }

    pub fn ka_star(&self) -> f64 {
        self.evaluation.eps.scores.ka_star
    }

    pub fn ka_tilde(&self) -> f64 {
        self.evaluation.eps.scores.ka_tilde
    }

    pub fn sensitivity(&self) -> f64 {
        self.evaluation.eps.scores.sensitivity
    }

    pub fn ka_nonlinear(&self) -> Option<f64> {
        self.evaluation.eps.scores.ka_nonlinear
    }

    /// `(ka_zero, ka_star, ka_tilde, sensitivity)` at the configured epsilon.
    pub fn tuple(&self) -> (f64, f64, f64, f64) {
        (
            self.ka_zero(),
            self.ka_star(),
            self.ka_tilde(),
            self.sensitivity(),
        )
    }
}

/// Per-DMU evaluations in sample order plus the presentation order
/// (descending zero-epsilon score, ties by id).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticSeries {
    pub order: Vec<usize>,
    pub entries: Vec<DiagnosticEntry>,
}

impl DiagnosticSeries {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sorted(&self) -> impl Iterator<Item = &DiagnosticEntry> {
        self.order.iter().map(|&i| &self.entries[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct OutlierFlags {
    pub case_i: bool,
    pub case_ii: bool,
    pub case_iii: bool,
    pub case_iv: bool,
    pub zscore_ka0: f64,
    pub zscore_kastar: f64,
    pub relative_drop: f64,
    pub sensitivity_magnitude: f64,
}

impl OutlierFlags {
    pub fn any(&self) -> bool {
        self.case_i || self.case_ii || self.case_iii || self.case_iv
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DetectOptions {
    /// Number of detection passes; each pass after the first runs on the
    /// previous sample minus its outliers.
    pub passes: usize,
    /// Also compute the non-linear KAM score for every DMU.
    pub nonlinear: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutlierReport {
    pub config: KamConfig,
    pub thresholds: DetectorThresholds,
    pub diagnostics: DiagnosticSeries,
    /// Indexed like `diagnostics.entries`.
    pub flags: Vec<OutlierFlags>,
    /// Sample indices of the flagged DMUs, ascending.
    pub outliers: Vec<usize>,
    pub second_pass: Option<Box<OutlierReport>>,
    pub second_pass_note: Option<String>,
}

impl OutlierReport {
    pub fn outlier_ids(&self) -> Vec<&str> {
        self.outliers
            .iter()
            .map(|&i| self.diagnostics.entries[i].id.as_str())
            .collect()
    }

    pub fn flags_for(&self, id: &str) -> Option<&OutlierFlags> {
        self.diagnostics
            .entries
            .iter()
            .position(|e| e.id == id)
            .map(|i| &self.flags[i])
    }
}

pub fn evaluate_sample(sample: &Sample, config: &KamConfig) -> Result<DiagnosticSeries> {
    evaluate_sample_with(sample, config, false)
}

/// Scores every DMU (in parallel) and sorts the presentation order.
pub fn evaluate_sample_with(
    sample: &Sample,
    config: &KamConfig,
    nonlinear: bool,
) -> Result<DiagnosticSeries> {
    config.validate_for(sample)?;
    let results: Vec<Result<DmuEvaluation>> = (0..sample.len())
        .into_par_iter()
        .map(|i| evaluate_dmu(sample, i, config, nonlinear))
        .collect();
    let entries = results
        .into_iter()
        .zip(sample.dmus())
        .map(|(r, dmu)| {
            r.map(|evaluation| DiagnosticEntry {
                id: dmu.id().to_owned(),
                evaluation,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    // Scores are compared on a grid of the score tolerance so that solver
    // noise does not reorder tied DMUs.
    let key = |e: &DiagnosticEntry| (e.ka_zero() / config.score_tolerance).round() as i64;
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&a, &b| {
        key(&entries[b])
            .cmp(&key(&entries[a]))
            .then_with(|| entries[a].id.cmp(&entries[b].id))
    });
    Ok(DiagnosticSeries { order, entries })
}

pub fn flag_outliers(
    diag: &DiagnosticSeries,
    thresholds: &DetectorThresholds,
    config: &KamConfig,
) -> Vec<OutlierFlags> {
    let ka0: Vec<f64> = diag.entries.iter().map(DiagnosticEntry::ka_zero).collect();
    let kastar: Vec<f64> = diag.entries.iter().map(DiagnosticEntry::ka_star).collect();
    let z0 = zscores(&ka0, thresholds.spread);
    let zs = zscores(&kastar, thresholds.spread);

    diag.entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let relative_drop = (e.ka_zero() - e.ka_star()) / e.ka_zero();
            let sensitivity_magnitude = 1.0 / e.sensitivity();
            let efficient = e.ka_zero() >= 1.0 - config.score_tolerance;
            OutlierFlags {
                case_i: z0[i] >= thresholds.z_much_greater,
                case_ii: zs[i] >= thresholds.z_much_greater,
                case_iii: relative_drop >= thresholds.drop_moderate,
                case_iv: efficient && sensitivity_magnitude >= thresholds.sensitivity_cut,
                zscore_ka0: z0[i],
                zscore_kastar: zs[i],
                relative_drop,
                sensitivity_magnitude,
            }
        })
        .collect()
}

/// z-scores of `values`; all zero when the spread vanishes.
fn zscores(values: &[f64], basis: SpreadBasis) -> Vec<f64> {
    let (center, spread) = match basis {
        SpreadBasis::StandardDeviation => {
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            (mean, var.sqrt())
        }
        SpreadBasis::MedianAbsoluteDeviation => {
            let med = median(values.to_vec());
            let mad = median(values.iter().map(|v| (v - med).abs()).collect());
            (med, 1.4826 * mad)
        }
    };
    if spread <= MIN_SPREAD {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - center) / spread).collect()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// One detection pass, optionally followed by a single exclusion rerun.
pub fn detect(
    sample: &Sample,
    config: &KamConfig,
    thresholds: &DetectorThresholds,
    second_pass: bool,
) -> Result<OutlierReport> {
    let options = DetectOptions {
        passes: if second_pass { 2 } else { 1 },
        nonlinear: false,
    };
    detect_with(sample, config, thresholds, &options)
}

pub fn detect_with(
    sample: &Sample,
    config: &KamConfig,
    thresholds: &DetectorThresholds,
    options: &DetectOptions,
) -> Result<OutlierReport> {
    thresholds.validate()?;
    let diagnostics = evaluate_sample_with(sample, config, options.nonlinear)?;
    let flags = flag_outliers(&diagnostics, thresholds, config);
    let outliers: Vec<usize> = (0..flags.len()).filter(|&i| flags[i].any()).collect();

    let mut report = OutlierReport {
        config: config.clone(),
        thresholds: *thresholds,
        diagnostics,
        flags,
        outliers,
        second_pass: None,
        second_pass_note: None,
    };
    if options.passes > 1 && !report.outliers.is_empty() {
        if report.outliers.len() == sample.len() {
            report.second_pass_note =
                Some("every DMU was flagged; no sample remains for a second pass".into());
        } else {
            let reduced = sample.without(&report.outliers)?;
            let next = DetectOptions {
                passes: options.passes - 1,
                ..*options
            };
            report.second_pass = Some(Box::new(detect_with(&reduced, config, thresholds, &next)?));
        }
    }
    Ok(report)
}
