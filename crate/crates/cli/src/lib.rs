//! File formats and orchestration behind the `kam` binary.

pub mod chart;
pub mod csv_io;
pub mod report;
pub mod run;

use std::path::PathBuf;

use kam_core::{ErrorCategory, KamError};
use thiserror::Error;

pub use chart::{export_polygon_chart, ChartFormat};
pub use csv_io::{read_sample_csv, read_sample_table, write_sample_csv, FactorNames, SampleTable};
pub use report::{write_report_json, ReportDoc, ReportSource};
pub use run::{
    parse_delta, parse_epsilon, parse_weights, read_scenario_spec, run, Exports, RunManifest,
    RunSummary, SampleSource,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{}: {}{message}", path.display(), line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Parse {
        path: PathBuf,
        line: Option<u64>,
        message: String,
    },

    #[error(transparent)]
    Core(#[from] KamError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 parse, 3 config, 4 solver, 5 io.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } => 2,
            CliError::Core(e) => match e.category() {
                ErrorCategory::Input => 2,
                ErrorCategory::Config => 3,
                ErrorCategory::Solver => 4,
            },
            CliError::Io { .. } => 5,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// `v` rounded to 12 significant digits, the precision of every number the
/// tool writes.
pub fn round12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}
