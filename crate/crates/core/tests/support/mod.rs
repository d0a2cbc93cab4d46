//! Independent oracles and generators shared by the integration tests.
//!
//! The oracles never call the simplex solver; `checks` inspects what the
//! engine returns.

#![allow(dead_code)]

pub mod checks;

use kam_core::{Dmu, Sample};
use proptest::prelude::*;

/// Axis-aligned constraints on the hull point `(X, Y)` of a one-input,
/// one-output program.
#[derive(Debug, Clone, Copy)]
pub struct Box2 {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
}

/// Extreme value of `f` over `conv(points) ∩ bounds`.
///
/// The region is a polygon whose vertices all lie on a segment between two
/// sample points, at an end of the part of that segment that satisfies the
/// bounds. Checking those candidates is exact for linear and for
/// linear-fractional `f`. Returns `(value, X, Y)`.
pub fn segment_extreme(
    points: &[(f64, f64)],
    bounds: Box2,
    maximize: bool,
    f: impl Fn(f64, f64) -> f64,
) -> Option<(f64, f64, f64)> {
    let mut best: Option<(f64, f64, f64)> = None;
    for i in 0..points.len() {
        for j in i..points.len() {
            let (a, b) = (points[i], points[j]);
            let (dx, dy) = (b.0 - a.0, b.1 - a.1);
            let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
            // Each bound reads `value + slope * t <= cap`.
            for (value, slope, cap) in [
                (a.0, dx, bounds.x_max),
                (-a.0, -dx, -bounds.x_min),
                (-a.1, -dy, -bounds.y_min),
            ] {
                let slack = cap - value;
                if slope.abs() < 1e-300 {
                    if slack < -1e-12 * (1.0 + cap.abs()) {
                        lo = 1.0;
                        hi = 0.0;
                    }
                } else if slope > 0.0 {
                    hi = hi.min(slack / slope);
                } else {
                    lo = lo.max(slack / slope);
                }
            }
            if lo > hi + 1e-12 {
                continue;
            }
            for t in [lo, hi.max(lo)] {
                let (x, y) = (a.0 + t * dx, a.1 + t * dy);
                let v = f(x, y);
                let better = match best {
                    None => true,
                    Some((bv, _, _)) => {
                        if maximize {
                            v > bv
                        } else {
                            v < bv
                        }
                    }
                };
                if better {
                    best = Some((v, x, y));
                }
            }
        }
    }
    best
}

/// Linear scores `(ka_hat, ka_star, ka_tilde)` of DMU `l` in a one-input,
/// one-output sample with proportional epsilon `r` and reciprocal weights.
pub fn linear_scores_1d(points: &[(f64, f64)], l: usize, r: f64) -> (f64, f64, f64) {
    let (x, y) = points[l];
    let (em, ep) = (r * x, r * y);
    let (wm, wp) = (1.0 / x, 1.0 / y);
    let bounds = Box2 {
        x_min: em,
        x_max: x + em,
        y_min: (y - ep).max(ep),
    };
    let (_, bx, by) = segment_extreme(points, bounds, true, |px, py| -wm * px + wp * py)
        .expect("self point is always feasible");
    let score = |tx: f64, ty: f64| (y * tx) / (x * ty);
    (
        score(bx - em, by + ep),
        score(bx, by),
        score(bx + em, by - ep),
    )
}

/// Non-linear score of DMU `l` under the same settings.
pub fn nonlinear_score_1d(points: &[(f64, f64)], l: usize, r: f64) -> f64 {
    let (x, y) = points[l];
    let (wm, wp) = (1.0 / x, 1.0 / y);
    let (big_em, big_ep) = (r * x / wm, r * y / wp);
    let bounds = Box2 {
        x_min: 0.0,
        x_max: x + big_em,
        y_min: y - big_ep,
    };
    segment_extreme(points, bounds, false, |px, py| (px / x) / (py / y))
        .expect("self point is always feasible")
        .0
}

/// Optimal objective of `max c·z` subject to `a z = b`, `g z >= h`, `z >= 0`,
/// found by trying every basis. `None` when no basic feasible point exists.
pub fn vertex_optimum(
    c: &[f64],
    a: &[Vec<f64>],
    b: &[f64],
    g: &[Vec<f64>],
    h: &[f64],
) -> Option<f64> {
    let n = c.len();
    let cols = n + g.len();
    let rows = a.len() + g.len();
    let mut matrix: Vec<Vec<f64>> = Vec::with_capacity(rows);
    let mut rhs = Vec::with_capacity(rows);
    for (row, &v) in a.iter().zip(b) {
        let mut r = row.clone();
        r.resize(cols, 0.0);
        matrix.push(r);
        rhs.push(v);
    }
    for (i, (row, &v)) in g.iter().zip(h).enumerate() {
        let mut r = row.clone();
        r.resize(cols, 0.0);
        r[n + i] = -1.0;
        matrix.push(r);
        rhs.push(v);
    }
    let mut best: Option<f64> = None;
    for basis in combinations(cols, rows) {
        let Some(zb) = solve_square(&matrix, &rhs, &basis) else {
            continue;
        };
        if zb.iter().any(|&v| v < -1e-9) {
            continue;
        }
        let value: f64 = basis
            .iter()
            .zip(&zb)
            .filter(|(&j, _)| j < n)
            .map(|(&j, v)| c[j] * v)
            .sum();
        if best.is_none_or(|bv| value > bv) {
            best = Some(value);
        }
    }
    best
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Gaussian elimination with partial pivoting on the chosen columns.
fn solve_square(matrix: &[Vec<f64>], rhs: &[f64], cols: &[usize]) -> Option<Vec<f64>> {
    let k = cols.len();
    let mut m: Vec<Vec<f64>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, &v)| {
            let mut r: Vec<f64> = cols.iter().map(|&j| row[j]).collect();
            r.push(v);
            r
        })
        .collect();
    for col in 0..k {
        let pivot = (col..k).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() < 1e-10 {
            return None;
        }
        m.swap(col, pivot);
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col {
                let factor = row[col] / pivot_row[col];
                for (v, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *v -= factor * p;
                }
            }
        }
    }
    Some((0..k).map(|i| m[i][k] / m[i][i]).collect())
}

pub fn sample_from(rows: &[(Vec<f64>, Vec<f64>)]) -> Sample {
    Sample::new(
        rows.iter()
            .enumerate()
            .map(|(i, (x, y))| Dmu::new(format!("U{i}"), x.clone(), y.clone()).unwrap())
            .collect(),
    )
    .unwrap()
}

pub fn points_of(sample: &Sample) -> Vec<(f64, f64)> {
    sample
        .dmus()
        .iter()
        .map(|d| (d.inputs()[0], d.outputs()[0]))
        .collect()
}

/// Strictly positive samples with `n` DMUs in `1..=max_n`, `m` inputs and
/// `p` outputs in `1..=max_dim`, every value in `lo..hi`.
pub fn positive_sample(
    max_n: usize,
    max_dim: usize,
    lo: f64,
    hi: f64,
) -> impl Strategy<Value = Sample> {
    (1..=max_n, 1..=max_dim, 1..=max_dim)
        .prop_flat_map(move |(n, m, p)| {
            proptest::collection::vec(
                (
                    proptest::collection::vec(lo..hi, m),
                    proptest::collection::vec(lo..hi, p),
                ),
                n,
            )
        })
        .prop_map(|rows| sample_from(&rows))
}

/// Like `positive_sample` but roughly one value in six is zero, keeping at
/// least one positive input and output per DMU.
pub fn sparse_sample(max_n: usize, max_dim: usize) -> impl Strategy<Value = Sample> {
    let cell = prop_oneof![1 => Just(0.0), 5 => 0.1..50.0_f64];
    (1..=max_n, 1..=max_dim, 1..=max_dim)
        .prop_flat_map(move |(n, m, p)| {
            proptest::collection::vec(
                (
                    proptest::collection::vec(cell.clone(), m),
                    proptest::collection::vec(cell.clone(), p),
                    0..m,
                    0..p,
                    0.1..50.0_f64,
                ),
                n,
            )
        })
        .prop_map(|rows| {
            let rows: Vec<(Vec<f64>, Vec<f64>)> = rows
                .into_iter()
                .map(|(mut x, mut y, j, k, fill)| {
                    if x.iter().all(|&v| v == 0.0) {
                        x[j] = fill;
                    }
                    if y.iter().all(|&v| v == 0.0) {
                        y[k] = fill;
                    }
                    (x, y)
                })
                .collect();
            sample_from(&rows)
        })
}
