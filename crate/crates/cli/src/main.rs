use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use kam_cli::{
    parse_delta, parse_epsilon, parse_weights, read_scenario_spec, run, CliError, Exports,
    RunManifest, SampleSource,
};
use kam_core::{DetectorThresholds, KamConfig, SpreadBasis};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Chart {
    Svg,
    Csv,
    None,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Spread {
    Sd,
    Mad,
}

/// Score DMUs with the linear KAM program and flag outliers.
#[derive(Debug, Parser)]
#[command(name = "kam", version)]
struct Args {
    /// Sample CSV with header `id,x:<name>...,y:<name>...`.
    #[arg(
        long,
        value_name = "CSV",
        required_unless_present = "generate",
        conflicts_with = "generate"
    )]
    input: Option<PathBuf>,

    /// Generate a synthetic sample from a JSON scenario spec instead.
    #[arg(long, value_name = "SPEC")]
    generate: Option<PathBuf>,

    /// Proportional rate, `halfmin`, `zero`, or a JSON file {"minus": [..], "plus": [..]}.
    #[arg(long, default_value = "0.1", value_name = "R|halfmin|zero|FILE")]
    epsilon: String,

    /// `reciprocal` or a JSON file of fixed weights.
    #[arg(long, default_value = "reciprocal", value_name = "reciprocal|FILE")]
    weights: String,

    /// `tenth`, `overfactors` or a fixed value.
    #[arg(long, default_value = "tenth", value_name = "tenth|overfactors|VALUE")]
    delta: String,

    /// z-score above which a score counts as much greater than the rest.
    #[arg(long, value_name = "REAL")]
    z: Option<f64>,

    /// Relative KA0 to KA* drop that counts as moderate.
    #[arg(long, value_name = "REAL")]
    drop: Option<f64>,

    /// Threshold on 1/S for a sensitive DMU.
    #[arg(long, value_name = "REAL")]
    sens: Option<f64>,

    /// Dispersion used by the z-scores.
    #[arg(long, value_enum)]
    spread: Option<Spread>,

    /// Rerun detection on the sample without the first-pass outliers.
    #[arg(long)]
    pass2: bool,

    #[arg(long, default_value = "kam-out", value_name = "DIR")]
    out: PathBuf,

    #[arg(long, value_enum, default_value = "svg")]
    chart: Chart,

    /// Also compute the non-linear KAM score.
    #[arg(long)]
    nonlinear: bool,
}

fn manifest(args: Args) -> Result<RunManifest, CliError> {
    let source = match (args.input, args.generate) {
        (Some(path), None) => SampleSource::Input(path),
        (None, Some(spec)) => SampleSource::Generate(read_scenario_spec(&spec)?),
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --input and --generate".into(),
            ))
        }
    };
    let config = KamConfig {
        epsilon: parse_epsilon(&args.epsilon)?,
        weights: parse_weights(&args.weights)?,
        delta_rule: parse_delta(&args.delta)?,
        ..KamConfig::default()
    };
    let defaults = DetectorThresholds::default();
    let thresholds = DetectorThresholds {
        z_much_greater: args.z.unwrap_or(defaults.z_much_greater),
        drop_moderate: args.drop.unwrap_or(defaults.drop_moderate),
        sensitivity_cut: args.sens.unwrap_or(defaults.sensitivity_cut),
        spread: match args.spread {
            None => defaults.spread,
            Some(Spread::Sd) => SpreadBasis::StandardDeviation,
            Some(Spread::Mad) => SpreadBasis::MedianAbsoluteDeviation,
        },
    };
    Ok(RunManifest {
        source,
        config,
        thresholds,
        out_dir: args.out,
        exports: Exports {
            report: true,
            series_csv: matches!(args.chart, Chart::Csv),
            chart_svg: matches!(args.chart, Chart::Svg),
        },
        second_pass: args.pass2,
        nonlinear: args.nonlinear,
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = manifest(args).and_then(|m| run(&m));
    match result {
        Ok(summary) => {
            println!("{} DMUs, {} outliers", summary.dmus, summary.outliers.len());
            for id in &summary.outliers {
                println!("  {id}");
            }
            if let Some(second) = &summary.second_pass_outliers {
                println!("second pass: {} outliers", second.len());
                for id in second {
                    println!("  {id}");
                }
            }
            for path in &summary.written {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("kam: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
