//! Polygon chart of the diagnostic series: the four per-DMU scores drawn as
//! polylines over the sorted DMU index.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use kam_core::DiagnosticSeries;

use crate::{round12, CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartFormat {
    Svg,
    Csv,
}

impl FromStr for ChartFormat {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svg" => Ok(ChartFormat::Svg),
            "csv" => Ok(ChartFormat::Csv),
            other => Err(CliError::Usage(format!(
                "unsupported chart format `{other}` (expected svg or csv)"
            ))),
        }
    }
}

const SERIES: [(&str, &str); 4] = [
    ("ka_zero", "#1f77b4"),
    ("ka_star", "#d62728"),
    ("ka_tilde", "#2ca02c"),
    ("sensitivity", "#9467bd"),
];

fn values(diag: &DiagnosticSeries) -> Vec<(String, [f64; 4])> {
    diag.sorted()
        .map(|e| {
            let (a, b, c, d) = e.tuple();
            (e.id.clone(), [a, b, c, d])
        })
        .collect()
}

pub fn export_polygon_chart(
    diag: &DiagnosticSeries,
    path: &Path,
    format: ChartFormat,
) -> Result<()> {
    if diag.is_empty() {
        return Err(CliError::Usage("cannot chart an empty series".into()));
    }
    let text = match format {
        ChartFormat::Csv => series_csv(diag),
        ChartFormat::Svg => series_svg(diag),
    };
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn series_csv(diag: &DiagnosticSeries) -> String {
    let mut out = String::from("rank,id");
    for (name, _) in SERIES {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (rank, (id, v)) in values(diag).iter().enumerate() {
        let _ = write!(out, "{},{}", rank + 1, csv_field(id));
        for x in v {
            let _ = write!(out, ",{}", round12(*x));
        }
        out.push('\n');
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn series_svg(diag: &DiagnosticSeries) -> String {
    const W: f64 = 800.0;
    const H: f64 = 420.0;
    const LEFT: f64 = 56.0;
    const RIGHT: f64 = 150.0;
    const TOP: f64 = 20.0;
    const BOTTOM: f64 = 48.0;
    let rows = values(diag);
    let n = rows.len();
    let top = rows
        .iter()
        .flat_map(|(_, v)| v.iter().copied())
        .filter(|v| v.is_finite())
        .fold(1.0_f64, f64::max);
    let y_max = (top * 10.0).ceil() / 10.0;
    let plot_w = W - LEFT - RIGHT;
    let plot_h = H - TOP - BOTTOM;
    let px = |i: usize| {
        if n == 1 {
            LEFT + plot_w / 2.0
        } else {
            LEFT + plot_w * i as f64 / (n - 1) as f64
        }
    };
    let py = |v: f64| TOP + plot_h * (1.0 - v.clamp(0.0, y_max) / y_max);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let (x0, x1, y0, y1) = (LEFT, LEFT + plot_w, TOP, TOP + plot_h);
    let _ = writeln!(
        s,
        r#"<path d="M{x0} {y0} L{x0} {y1} L{x1} {y1}" fill="none" stroke="black"/>"#
    );
    let ticks = (y_max / 0.25).round() as usize;
    for t in 0..=ticks {
        let v = t as f64 * 0.25;
        let y = py(v);
        let _ = writeln!(
            s,
            r##"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{v:.2}</text>"##,
            x0 - 4.0,
            x0 - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{}" text-anchor="middle">DMUs in diagnostic order (n = {n})</text>"#,
        LEFT + plot_w / 2.0,
        H - 12.0
    );
    for (k, (name, color)) in SERIES.iter().enumerate() {
        let points: Vec<String> = rows
            .iter()
            .enumerate()
            .map(|(i, (_, v))| format!("{:.2},{:.2}", px(i), py(v[k])))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="{name}" points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            points.join(" ")
        );
    }
    let lx = W - RIGHT + 16.0;
    for (k, (name, color)) in SERIES.iter().enumerate() {
        let y = TOP + 10.0 + 20.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="3"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            y + 4.0,
            xml_escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}
