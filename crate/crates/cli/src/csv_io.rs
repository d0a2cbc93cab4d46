//! Sample CSV format: a mandatory header `id,x:<name>...,y:<name>...` with
//! input and output columns in any order, then one row per DMU.

use std::fs::File;
use std::path::Path;

use kam_core::{Dmu, KamError, Sample};

use crate::{CliError, Result};

/// Column names of the inputs and outputs, without the `x:`/`y:` prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorNames {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl FactorNames {
    /// `in1..inM`, `out1..outP`.
    pub fn generic(m: usize, p: usize) -> Self {
        Self {
            inputs: (1..=m).map(|j| format!("in{j}")).collect(),
            outputs: (1..=p).map(|k| format!("out{k}")).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleTable {
    pub sample: Sample,
    pub names: FactorNames,
}

enum Column {
    Input(usize),
    Output(usize),
}

pub fn read_sample_csv(path: &Path) -> Result<Sample> {
    Ok(read_sample_table(path)?.sample)
}

pub fn read_sample_table(path: &Path) -> Result<SampleTable> {
    let fail = |line: Option<u64>, message: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let file = File::open(path).map_err(|e| fail(None, format!("cannot open: {e}")))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut records = reader.records();

    let header = match records.next() {
        None => return Err(fail(Some(1), "missing header row".into())),
        Some(r) => r.map_err(|e| fail(e.position().map(|p| p.line()), e.to_string()))?,
    };
    if header.get(0) != Some("id") {
        return Err(fail(
            Some(1),
            "header must start with an `id` column".into(),
        ));
    }
    let mut names = FactorNames {
        inputs: Vec::new(),
        outputs: Vec::new(),
    };
    let mut columns = Vec::new();
    for field in header.iter().skip(1) {
        let (list, name, column) = if let Some(name) = field.strip_prefix("x:") {
            let column = Column::Input(names.inputs.len());
            (&mut names.inputs, name, column)
        } else if let Some(name) = field.strip_prefix("y:") {
            let column = Column::Output(names.outputs.len());
            (&mut names.outputs, name, column)
        } else {
            return Err(fail(
                Some(1),
                format!("column `{field}` is neither `x:<name>` nor `y:<name>`"),
            ));
        };
        if name.is_empty() || list.iter().any(|n| n == name) {
            return Err(fail(
                Some(1),
                format!("empty or repeated column name `{field}`"),
            ));
        }
        list.push(name.to_owned());
        columns.push(column);
    }
    if names.inputs.is_empty() {
        return Err(fail(Some(1), "no input (`x:`) column".into()));
    }
    if names.outputs.is_empty() {
        return Err(fail(Some(1), "no output (`y:`) column".into()));
    }

    let width = header.len();
    let mut dmus: Vec<Dmu> = Vec::new();
    for record in records {
        let record = record.map_err(|e| fail(e.position().map(|p| p.line()), e.to_string()))?;
        let line = record.position().map(|p| p.line());
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != width {
            return Err(fail(
                line,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        let id = record.get(0).unwrap_or_default();
        if dmus.iter().any(|d| d.id() == id) {
            return Err(fail(line, format!("duplicate id `{id}`")));
        }
        let mut inputs = vec![0.0; names.inputs.len()];
        let mut outputs = vec![0.0; names.outputs.len()];
        for (raw, column) in record.iter().skip(1).zip(&columns) {
            let value: f64 = raw
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| fail(line, format!("`{raw}` is not a finite number")))?;
            if value < 0.0 {
                return Err(fail(line, format!("negative value {raw}")));
            }
            match column {
                Column::Input(j) => inputs[*j] = value,
                Column::Output(k) => outputs[*k] = value,
            }
        }
        let dmu = Dmu::new(id, inputs, outputs).map_err(|e| match e {
            KamError::InvalidDmu { reason, .. } => fail(line, format!("DMU `{id}`: {reason}")),
            other => fail(line, other.to_string()),
        })?;
        dmus.push(dmu);
    }
    if dmus.is_empty() {
        return Err(fail(None, "no DMU rows".into()));
    }
    let sample = Sample::new(dmus).map_err(|e| fail(None, e.to_string()))?;
    Ok(SampleTable { sample, names })
}

/// Writes inputs first, then outputs. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_sample_csv(sample: &Sample, names: &FactorNames, path: &Path) -> Result<()> {
    if names.inputs.len() != sample.input_count() || names.outputs.len() != sample.output_count() {
        return Err(CliError::Usage(format!(
            "{} input and {} output names given for a sample with {} and {}",
            names.inputs.len(),
            names.outputs.len(),
            sample.input_count(),
            sample.output_count()
        )));
    }
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::io(path, source),
        other => CliError::io(path, std::io::Error::other(format!("{other:?}"))),
    };
    let mut writer = csv::Writer::from_path(path).map_err(io)?;
    let mut header = vec!["id".to_owned()];
    header.extend(names.inputs.iter().map(|n| format!("x:{n}")));
    header.extend(names.outputs.iter().map(|n| format!("y:{n}")));
    writer.write_record(&header).map_err(io)?;
    for dmu in sample.dmus() {
        let mut row = vec![dmu.id().to_owned()];
        row.extend(
            dmu.inputs()
                .iter()
                .chain(dmu.outputs())
                .map(|v| v.to_string()),
        );
        writer.write_record(&row).map_err(io)?;
    }
    writer.flush().map_err(|e| CliError::io(path, e))
}
