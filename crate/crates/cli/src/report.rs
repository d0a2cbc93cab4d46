//! JSON report. Field order follows the struct declarations below and every
//! real number is rounded to 12 significant digits, so identical runs give
//! identical bytes.

use std::path::Path;

use kam_core::{
    DetectorThresholds, DiagnosticEntry, EfficiencyKind, KamConfig, Label, OutlierFlags,
    OutlierReport, Sample, ScenarioSpec, TargetPoint,
};
use serde::{Deserialize, Serialize, Serializer};

use crate::csv_io::FactorNames;
use crate::{round12, CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;

fn r12<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round12(*v))
}

fn r12_opt<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_some(&round12(*v)),
        None => s.serialize_none(),
    }
}

fn r12_vec<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| round12(*x)))
}

/// Where the sample came from.
#[derive(Debug, Clone, PartialEq)]
pub enum ReportSource {
    Csv {
        path: String,
    },
    Generated {
        spec: ScenarioSpec,
        labels: Vec<Label>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub schema_version: u32,
    pub sample: SampleBlock,
    pub config: ConfigBlock,
    pub thresholds: DetectorThresholds,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub generator: Option<GeneratorBlock>,
    #[serde(flatten)]
    pub pass: PassBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBlock {
    pub source: String,
    pub dmus: usize,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigBlock {
    #[serde(flatten)]
    pub kam: KamConfig,
    #[serde(serialize_with = "r12")]
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorBlock {
    pub spec: ScenarioSpec,
    pub labels: Vec<LabelEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelEntry {
    pub id: String,
    pub label: Label,
}

/// One detection pass; nests when a second pass ran.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassBlock {
    pub outliers: Vec<String>,
    pub dmus: Vec<DmuBlock>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub second_pass: Option<Box<SecondPassBlock>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub second_pass_note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondPassBlock {
    pub excluded: Vec<String>,
    #[serde(flatten)]
    pub pass: PassBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmuBlock {
    pub id: String,
    /// Position in the diagnostic order, from 1.
    pub rank: usize,
    #[serde(serialize_with = "r12_vec")]
    pub inputs: Vec<f64>,
    #[serde(serialize_with = "r12_vec")]
    pub outputs: Vec<f64>,
    pub scores: ScoreBlock,
    pub efficiency: EfficiencyBlock,
    pub targets: TargetBlock,
    pub flags: FlagBlock,
    pub outlier: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreBlock {
    #[serde(serialize_with = "r12")]
    pub ka_zero: f64,
    #[serde(serialize_with = "r12")]
    pub ka_hat: f64,
    #[serde(serialize_with = "r12")]
    pub ka_star: f64,
    #[serde(serialize_with = "r12")]
    pub ka_tilde: f64,
    #[serde(serialize_with = "r12")]
    pub sensitivity: f64,
    #[serde(
        serialize_with = "r12_opt",
        skip_serializing_if = "Option::is_none",
        default
    )]
    pub ka_nonlinear: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyBlock {
    pub class: String,
    #[serde(serialize_with = "r12")]
    pub delta: f64,
    #[serde(serialize_with = "r12")]
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointBlock {
    #[serde(serialize_with = "r12_vec")]
    pub inputs: Vec<f64>,
    #[serde(serialize_with = "r12_vec")]
    pub outputs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetBlock {
    pub highest: PointBlock,
    pub best_technical: PointBlock,
    pub lowest: PointBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlagBlock {
    pub case_i: bool,
    pub case_ii: bool,
    pub case_iii: bool,
    pub case_iv: bool,
    #[serde(serialize_with = "r12")]
    pub zscore_ka0: f64,
    #[serde(serialize_with = "r12")]
    pub zscore_kastar: f64,
    #[serde(serialize_with = "r12")]
    pub relative_drop: f64,
    #[serde(serialize_with = "r12")]
    pub sensitivity_magnitude: f64,
}

fn point(t: &TargetPoint) -> PointBlock {
    PointBlock {
        inputs: t.inputs.clone(),
        outputs: t.outputs.clone(),
    }
}

fn dmu_block(
    entry: &DiagnosticEntry,
    rank: usize,
    flags: &OutlierFlags,
    outlier: bool,
    sample: &Sample,
) -> DmuBlock {
    let eval = &entry.evaluation;
    let scores = &eval.eps.scores;
    let dmu = sample.dmu(eval.eps.solution.evaluated);
    let (inputs, outputs) = (dmu.inputs().to_vec(), dmu.outputs().to_vec());
    DmuBlock {
        id: entry.id.clone(),
        rank,
        inputs,
        outputs,
        scores: ScoreBlock {
            ka_zero: entry.ka_zero(),
            ka_hat: scores.ka_hat,
            ka_star: scores.ka_star,
            ka_tilde: scores.ka_tilde,
            sensitivity: scores.sensitivity,
            ka_nonlinear: scores.ka_nonlinear,
        },
        efficiency: EfficiencyBlock {
            class: match eval.class.kind {
                EfficiencyKind::KamEfficient => "kam_efficient".into(),
                EfficiencyKind::Inefficient => "inefficient".into(),
            },
            delta: eval.class.delta_used,
            gap: eval.class.gap,
        },
        targets: TargetBlock {
            highest: point(&eval.eps.targets.highest),
            best_technical: point(&eval.eps.targets.best_technical),
            lowest: point(&eval.eps.targets.lowest),
        },
        flags: FlagBlock {
            case_i: flags.case_i,
            case_ii: flags.case_ii,
            case_iii: flags.case_iii,
            case_iv: flags.case_iv,
            zscore_ka0: flags.zscore_ka0,
            zscore_kastar: flags.zscore_kastar,
            relative_drop: flags.relative_drop,
            sensitivity_magnitude: flags.sensitivity_magnitude,
        },
        outlier,
    }
}

fn pass_block(report: &OutlierReport, sample: &Sample) -> PassBlock {
    let diag = &report.diagnostics;
    let dmus = diag
        .order
        .iter()
        .enumerate()
        .map(|(rank, &i)| {
            let outlier = report.outliers.contains(&i);
            dmu_block(
                &diag.entries[i],
                rank + 1,
                &report.flags[i],
                outlier,
                sample,
            )
        })
        .collect();
    PassBlock {
        outliers: report.outlier_ids().iter().map(|s| s.to_string()).collect(),
        dmus,
        second_pass: report.second_pass.as_ref().map(|next| {
            let reduced = sample
                .without(&report.outliers)
                .expect("a second pass only runs on a nonempty reduced sample");
            Box::new(SecondPassBlock {
                excluded: report.outlier_ids().iter().map(|s| s.to_string()).collect(),
                pass: pass_block(next, &reduced),
            })
        }),
        second_pass_note: report.second_pass_note.clone(),
    }
}

impl ReportDoc {
    /// `sample` is the one `report` was computed on.
    pub fn build(
        report: &OutlierReport,
        sample: &Sample,
        names: &FactorNames,
        source: &ReportSource,
    ) -> Result<Self> {
        let diag = &report.diagnostics;
        let (m, p) = (names.inputs.len(), names.outputs.len());
        let delta = report.config.delta(m, p)?;
        let (source_text, generator) = match source {
            ReportSource::Csv { path } => (path.clone(), None),
            ReportSource::Generated { spec, labels } => (
                "generated".to_owned(),
                Some(GeneratorBlock {
                    spec: spec.clone(),
                    labels: diag
                        .entries
                        .iter()
                        .zip(labels)
                        .map(|(e, l)| LabelEntry {
                            id: e.id.clone(),
                            label: *l,
                        })
                        .collect(),
                }),
            ),
        };
        Ok(ReportDoc {
            schema_version: SCHEMA_VERSION,
            sample: SampleBlock {
                source: source_text,
                dmus: diag.len(),
                inputs: names.inputs.clone(),
                outputs: names.outputs.clone(),
            },
            config: ConfigBlock {
                kam: report.config.clone(),
                delta,
            },
            thresholds: report.thresholds,
            generator,
            pass: pass_block(report, sample),
        })
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report is always serializable");
        text.push('\n');
        text
    }
}

pub fn write_report_json(
    report: &OutlierReport,
    sample: &Sample,
    names: &FactorNames,
    source: &ReportSource,
    path: &Path,
) -> Result<()> {
    let doc = ReportDoc::build(report, sample, names, source)?;
    std::fs::write(path, doc.to_json()).map_err(|e| CliError::io(path, e))
}
