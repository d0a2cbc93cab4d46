//! One end-to-end run: read or generate a sample, detect, write the exports.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use kam_core::{
    detect_with, generate, DeltaRule, DetectOptions, DetectorThresholds, EpsilonScheme, KamConfig,
    ScenarioSpec, WeightScheme,
};
use serde::Deserialize;

use crate::chart::{export_polygon_chart, ChartFormat};
use crate::csv_io::{read_sample_table, write_sample_csv, FactorNames, SampleTable};
use crate::report::{write_report_json, ReportSource};
use crate::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum SampleSource {
    Input(PathBuf),
    Generate(ScenarioSpec),
}

/// Which files a run writes into the output directory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exports {
    pub report: bool,
    pub series_csv: bool,
    pub chart_svg: bool,
}

impl Default for Exports {
    fn default() -> Self {
        Self {
            report: true,
            series_csv: false,
            chart_svg: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub source: SampleSource,
    pub config: KamConfig,
    pub thresholds: DetectorThresholds,
    pub out_dir: PathBuf,
    pub exports: Exports,
    pub second_pass: bool,
    pub nonlinear: bool,
}

impl RunManifest {
    pub fn new(source: SampleSource, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            source,
            config: KamConfig::default(),
            thresholds: DetectorThresholds::default(),
            out_dir: out_dir.into(),
            exports: Exports::default(),
            second_pass: false,
            nonlinear: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub dmus: usize,
    pub outliers: Vec<String>,
    /// Outliers of the rerun on the reduced sample, when one ran.
    pub second_pass_outliers: Option<Vec<String>>,
    pub written: Vec<PathBuf>,
    pub elapsed: Duration,
}

pub fn run(manifest: &RunManifest) -> Result<RunSummary> {
    let started = Instant::now();
    manifest.config.validate()?;
    manifest.thresholds.validate()?;

    let out = &manifest.out_dir;
    let mut written = Vec::new();
    let (table, source) = match &manifest.source {
        SampleSource::Input(path) => (
            read_sample_table(path)?,
            ReportSource::Csv {
                path: path.display().to_string(),
            },
        ),
        SampleSource::Generate(spec) => {
            let generated = generate(spec)?;
            let names = FactorNames {
                inputs: vec!["input".into()],
                outputs: vec!["output".into()],
            };
            std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
            let path = out.join("sample.csv");
            write_sample_csv(&generated.sample, &names, &path)?;
            written.push(path);
            (
                SampleTable {
                    sample: generated.sample,
                    names,
                },
                ReportSource::Generated {
                    spec: spec.clone(),
                    labels: generated.labels,
                },
            )
        }
    };
    manifest.config.validate_for(&table.sample)?;

    let options = DetectOptions {
        passes: if manifest.second_pass { 2 } else { 1 },
        nonlinear: manifest.nonlinear,
    };
    let report = detect_with(
        &table.sample,
        &manifest.config,
        &manifest.thresholds,
        &options,
    )?;

    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    if manifest.exports.report {
        let path = out.join("report.json");
        write_report_json(&report, &table.sample, &table.names, &source, &path)?;
        written.push(path);
    }
    let mut charts = vec![("", &report.diagnostics)];
    if let Some(next) = &report.second_pass {
        charts.push(("_pass2", &next.diagnostics));
    }
    for (suffix, diag) in charts {
        if manifest.exports.series_csv {
            let path = out.join(format!("series{suffix}.csv"));
            export_polygon_chart(diag, &path, ChartFormat::Csv)?;
            written.push(path);
        }
        if manifest.exports.chart_svg {
            let path = out.join(format!("chart{suffix}.svg"));
            export_polygon_chart(diag, &path, ChartFormat::Svg)?;
            written.push(path);
        }
    }

    let ids = |r: &kam_core::OutlierReport| r.outlier_ids().iter().map(|s| s.to_string()).collect();
    Ok(RunSummary {
        dmus: table.sample.len(),
        outliers: ids(&report),
        second_pass_outliers: report.second_pass.as_deref().map(ids),
        written,
        elapsed: started.elapsed(),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VectorPair {
    minus: Vec<f64>,
    plus: Vec<f64>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: None,
        message: format!("cannot open: {e}"),
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: Some(e.line() as u64),
        message: e.to_string(),
    })
}

/// `--epsilon`: a proportional rate, `halfmin`, `zero`, or a JSON file
/// `{"minus": [..], "plus": [..]}` of fixed vectors.
pub fn parse_epsilon(arg: &str) -> Result<EpsilonScheme> {
    match arg {
        "halfmin" => Ok(EpsilonScheme::AbsoluteHalfMin),
        "zero" => Ok(EpsilonScheme::Zero),
        _ => match arg.parse::<f64>() {
            Ok(rate) => Ok(EpsilonScheme::Proportional { rate }),
            Err(_) if Path::new(arg).is_file() => {
                let v: VectorPair = read_json(Path::new(arg))?;
                Ok(EpsilonScheme::Fixed {
                    minus: v.minus,
                    plus: v.plus,
                })
            }
            Err(_) => Err(CliError::Usage(format!(
                "--epsilon expects a rate, `halfmin`, `zero` or a JSON file, got `{arg}`"
            ))),
        },
    }
}

/// `--weights`: `reciprocal` or a JSON file of fixed weight vectors.
pub fn parse_weights(arg: &str) -> Result<WeightScheme> {
    if arg == "reciprocal" {
        return Ok(WeightScheme::ReciprocalOfEvaluated);
    }
    if Path::new(arg).is_file() {
        let v: VectorPair = read_json(Path::new(arg))?;
        return Ok(WeightScheme::Fixed {
            minus: v.minus,
            plus: v.plus,
        });
    }
    Err(CliError::Usage(format!(
        "--weights expects `reciprocal` or a JSON file, got `{arg}`"
    )))
}

/// `--delta`: `tenth`, `overfactors` or a number.
pub fn parse_delta(arg: &str) -> Result<DeltaRule> {
    match arg {
        "tenth" => Ok(DeltaRule::TenthOfEpsilon),
        "overfactors" => Ok(DeltaRule::EpsilonOverFactors),
        _ => arg.parse().map(DeltaRule::Fixed).map_err(|_| {
            CliError::Usage(format!(
                "--delta expects `tenth`, `overfactors` or a number, got `{arg}`"
            ))
        }),
    }
}

/// Scenario spec from a JSON file; omitted fields take their defaults.
pub fn read_scenario_spec(path: &Path) -> Result<ScenarioSpec> {
    read_json(path)
}
