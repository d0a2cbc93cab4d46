mod support;

use kam_core::{solve_lp, LinearProgram, LpStatus};
use proptest::prelude::*;
use support::{segment_extreme, vertex_optimum, Box2};

const TOL: f64 = 1e-9;

/// A program shaped like the engine's: `lambda` on the simplex, one
/// perturbed equality per factor, slack lower bounds via guard rows.
struct KamShaped {
    c: Vec<f64>,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    g: Vec<Vec<f64>>,
    h: Vec<f64>,
}

impl KamShaped {
    fn new(
        inputs: &[Vec<f64>],
        outputs: &[Vec<f64>],
        l: usize,
        eps: (&[f64], &[f64]),
        w: (&[f64], &[f64]),
    ) -> Self {
        let (n, m, p) = (inputs.len(), inputs[0].len(), outputs[0].len());
        let nvars = n + m + p;
        let mut c = vec![0.0; nvars];
        c[n..n + m].copy_from_slice(w.0);
        c[n + m..].copy_from_slice(w.1);
        let (mut a, mut b, mut g, mut h) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for j in 0..m {
            let mut row: Vec<f64> = inputs.iter().map(|x| x[j]).collect();
            row.resize(nvars, 0.0);
            row[n + j] = 1.0;
            a.push(row);
            b.push(inputs[l][j] + eps.0[j]);
            let mut guard = vec![0.0; nvars];
            guard[n + j] = -1.0;
            g.push(guard);
            h.push(-inputs[l][j]);
        }
        for k in 0..p {
            let mut row: Vec<f64> = outputs.iter().map(|y| y[k]).collect();
            row.resize(nvars, 0.0);
            row[n + m + k] = -1.0;
            a.push(row);
            b.push(outputs[l][k] - eps.1[k]);
            let mut guard = vec![0.0; nvars];
            guard[n + m + k] = 1.0;
            g.push(guard);
            h.push(2.0 * eps.1[k] - outputs[l][k]);
        }
        let mut convexity = vec![1.0; n];
        convexity.resize(nvars, 0.0);
        a.push(convexity);
        b.push(1.0);
        Self { c, a, b, g, h }
    }

    fn program(&self) -> LinearProgram {
        let mut lp = LinearProgram::maximize(self.c.clone());
        for (row, &v) in self.a.iter().zip(&self.b) {
            lp.add_equality(row.clone(), v);
        }
        for (row, &v) in self.g.iter().zip(&self.h) {
            lp.add_at_least(row.clone(), v);
        }
        lp
    }
}

fn one_factor_case() -> impl Strategy<Value = (Vec<(f64, f64)>, usize, f64, f64, f64, f64)> {
    (1..=200usize)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec((0.01..100.0_f64, 0.01..100.0_f64), n),
                0..n,
                0.0..0.49_f64,
                0.0..0.49_f64,
                0.01..10.0_f64,
                0.01..10.0_f64,
            )
        })
        .prop_map(|(pts, l, rm, rp, wm, wp)| {
            let (x, y) = pts[l];
            (pts, l, rm * x, rp * y, wm / x, wp / y)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn one_factor_programs_match_segment_oracle(
        (points, l, em, ep, wm, wp) in one_factor_case(),
    ) {
        let inputs: Vec<Vec<f64>> = points.iter().map(|p| vec![p.0]).collect();
        let outputs: Vec<Vec<f64>> = points.iter().map(|p| vec![p.1]).collect();
        let shaped = KamShaped::new(&inputs, &outputs, l, (&[em], &[ep]), (&[wm], &[wp]));
        let sol = solve_lp(&shaped.program(), TOL).unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);

        let (x, y) = points[l];
        let bounds = Box2 { x_min: em, x_max: x + em, y_min: (y - ep).max(ep) };
        let objective = |hx: f64, hy: f64| wm * (x + em - hx) + wp * (hy - y + ep);
        let (best, _, _) = segment_extreme(&points, bounds, true, objective).unwrap();
        prop_assert!((sol.objective - best).abs() <= 1e-6, "{} vs {}", sol.objective, best);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn small_programs_match_vertex_enumeration(
        (n, m, p) in (1..=4usize, 1..=2usize, 1..=2usize),
        seed in proptest::collection::vec(0.05..50.0_f64, 4 * 4 + 8),
        rates in proptest::collection::vec(0.0..0.49_f64, 4),
        weights in proptest::collection::vec(0.01..5.0_f64, 4),
        l in 0..4usize,
    ) {
        let l = l % n;
        let inputs: Vec<Vec<f64>> = (0..n).map(|i| seed[i * 4..i * 4 + m].to_vec()).collect();
        let outputs: Vec<Vec<f64>> = (0..n).map(|i| seed[i * 4 + 2..i * 4 + 2 + p].to_vec()).collect();
        let em: Vec<f64> = (0..m).map(|j| rates[j] * inputs[l][j]).collect();
        let ep: Vec<f64> = (0..p).map(|k| rates[2 + k] * outputs[l][k]).collect();
        let shaped = KamShaped::new(&inputs, &outputs, l, (&em, &ep), (&weights[..m], &weights[2..2 + p]));
        let sol = solve_lp(&shaped.program(), TOL).unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        let best = vertex_optimum(&shaped.c, &shaped.a, &shaped.b, &shaped.g, &shaped.h).unwrap();
        prop_assert!((sol.objective - best).abs() <= 1e-6, "{} vs {}", sol.objective, best);
    }

    #[test]
    fn generic_programs_match_vertex_enumeration(
        nvars in 2..=5usize,
        neq in 0..=2usize,
        nge in 0..=2usize,
        coeffs in proptest::collection::vec(-5.0..5.0_f64, 5 * 4),
        objective in proptest::collection::vec(-3.0..3.0_f64, 5),
        point in proptest::collection::vec(0.0..3.0_f64, 5),
        margins in proptest::collection::vec(0.0..2.0_f64, 2),
    ) {
        // Rows are built around a known nonnegative point so the program is
        // feasible; a cap on the variable sum keeps it bounded.
        let point = &point[..nvars];
        let row = |i: usize| coeffs[i * 5..i * 5 + nvars].to_vec();
        let dot = |r: &[f64]| r.iter().zip(point).map(|(a, b)| a * b).sum::<f64>();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..neq {
            let r = row(i);
            b.push(dot(&r));
            a.push(r);
        }
        let mut g = Vec::new();
        let mut h = Vec::new();
        for (i, margin) in margins.iter().enumerate().take(nge) {
            let r = row(2 + i);
            h.push(dot(&r) - margin);
            g.push(r);
        }
        let total: f64 = point.iter().sum();
        g.push(vec![-1.0; nvars]);
        h.push(-(total + 5.0));

        let mut lp = LinearProgram::maximize(objective[..nvars].to_vec());
        for (r, &v) in a.iter().zip(&b) {
            lp.add_equality(r.clone(), v);
        }
        for (r, &v) in g.iter().zip(&h) {
            lp.add_at_least(r.clone(), v);
        }
        let sol = solve_lp(&lp, TOL).unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        prop_assert!(lp.max_violation(&sol.values) <= 1e-7);
        let best = vertex_optimum(&objective[..nvars], &a, &b, &g, &h).unwrap();
        prop_assert!((sol.objective - best).abs() <= 1e-6, "{} vs {}", sol.objective, best);
    }
}

#[test]
fn large_program_resolves_bitwise_identically() {
    let n = 200;
    let points: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t = i as f64 / n as f64;
            (
                1.0 + 9.0 * t,
                (1.0 + 9.0 * t).sqrt() * (0.6 + 0.4 * (i * 37 % 101) as f64 / 101.0),
            )
        })
        .collect();
    let inputs: Vec<Vec<f64>> = points.iter().map(|p| vec![p.0]).collect();
    let outputs: Vec<Vec<f64>> = points.iter().map(|p| vec![p.1]).collect();
    let (x, y) = points[150];
    let shaped = KamShaped::new(
        &inputs,
        &outputs,
        150,
        (&[0.1 * x], &[0.1 * y]),
        (&[1.0 / x], &[1.0 / y]),
    );
    let lp = shaped.program();
    let first = solve_lp(&lp, TOL).unwrap();
    for _ in 0..5 {
        let again = solve_lp(&lp, TOL).unwrap();
        assert_eq!(first.iterations, again.iterations);
        assert_eq!(first.objective.to_bits(), again.objective.to_bits());
        let bits = |v: &[f64]| v.iter().map(|f| f.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&first.values), bits(&again.values));
    }
}
