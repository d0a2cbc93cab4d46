use kam_cli::{export_polygon_chart, ChartFormat, CliError};
use kam_core::{evaluate_sample, Dmu, KamConfig, Sample};
use proptest::prelude::*;

fn sample(points: &[(f64, f64)]) -> Sample {
    Sample::new(
        points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Dmu::new(format!("P{i}"), vec![x], vec![y]).unwrap())
            .collect(),
    )
    .unwrap()
}

fn export(points: &[(f64, f64)], format: ChartFormat) -> String {
    let diag = evaluate_sample(&sample(points), &KamConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chart");
    export_polygon_chart(&diag, &path, format).unwrap();
    std::fs::read_to_string(path).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn two_dmu_example_csv() {
    let text = export(&[(2.0, 7.0), (10.0, 7.1)], ChartFormat::Csv);
    assert!(text.starts_with("rank,id,ka_zero,ka_star,ka_tilde,sensitivity\n"));
    let rows = rows(&text);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][2], "1");
    assert_eq!(rows[0][1], "P0");
}

#[test]
fn single_dmu_svg_has_four_one_point_polylines() {
    let svg = export(&[(3.0, 4.0)], ChartFormat::Svg);
    assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
    assert!(svg.trim_end().ends_with("</svg>"));
    let polylines: Vec<&str> = svg.lines().filter(|l| l.starts_with("<polyline")).collect();
    assert_eq!(polylines.len(), 4);
    for line in polylines {
        let points = line
            .split("points=\"")
            .nth(1)
            .unwrap()
            .split('"')
            .next()
            .unwrap();
        assert_eq!(points.split(' ').count(), 1, "{line}");
    }
    for name in ["ka_zero", "ka_star", "ka_tilde", "sensitivity"] {
        assert!(
            svg.contains(&format!(">{name}</text>")),
            "legend lacks {name}"
        );
    }
}

#[test]
fn unknown_format_is_a_usage_error() {
    let err = "png".parse::<ChartFormat>().unwrap_err();
    assert!(matches!(err, CliError::Usage(_)));
    assert_eq!(err.exit_code(), 2);
    assert_eq!("svg".parse::<ChartFormat>().unwrap(), ChartFormat::Svg);
    assert_eq!("csv".parse::<ChartFormat>().unwrap(), ChartFormat::Csv);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn csv_series_is_sorted_by_ka_zero(
        points in prop::collection::vec((1.0..10.0_f64, 1.0..10.0_f64), 1..25),
    ) {
        let text = export(&points, ChartFormat::Csv);
        let rows = rows(&text);
        prop_assert_eq!(rows.len(), points.len());
        let ka_zero: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
        // Ties within the score tolerance are ordered by id.
        let tol = KamConfig::default().score_tolerance;
        prop_assert!(ka_zero.windows(2).all(|w| w[0] >= w[1] - tol), "{:?}", ka_zero);
        let svg = export(&points, ChartFormat::Svg);
        let polylines = svg.lines().filter(|l| l.starts_with("<polyline")).count();
        prop_assert_eq!(polylines, 4);
    }
}
