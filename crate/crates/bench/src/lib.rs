//! Shared fixtures for the benchmarks.

use kam_core::{generate, LinearProgram, Sample, ScenarioSpec};

/// The default generated scenario scaled to roughly `n` DMUs, keeping the
/// share of injected outliers.
pub fn scenario(n: usize) -> Sample {
    let spikes = (n / 10).max(1);
    let nfd = (n * 8 / 100).max(1);
    let spec = ScenarioSpec {
        n_clean: n.saturating_sub(spikes + nfd).max(2),
        n_outlier_spikes: spikes,
        n_nfd: nfd,
        ..ScenarioSpec::default()
    };
    generate(&spec)
        .expect("default scenario parameters are valid")
        .sample
}

/// The linear program for evaluating DMU `l` of a one-input, one-output
/// sample at rate 0.1 with reciprocal weights, built by hand so the solver
/// can be timed on its own. Variables are `lambda`, then `s-`, then `s+`.
pub fn kam_program(sample: &Sample, l: usize) -> LinearProgram {
    let n = sample.len();
    let dmu = sample.dmu(l);
    let (x, y) = (dmu.inputs()[0], dmu.outputs()[0]);
    let (em, ep) = (0.1 * x, 0.1 * y);
    let mut objective = vec![0.0; n + 2];
    objective[n] = 1.0 / x;
    objective[n + 1] = 1.0 / y;
    let mut lp = LinearProgram::maximize(objective);

    let xs: Vec<f64> = sample.dmus().iter().map(|d| d.inputs()[0]).collect();
    let ys: Vec<f64> = sample.dmus().iter().map(|d| d.outputs()[0]).collect();
    let row = |hull: &[f64], a: f64, b: f64| {
        let mut r = hull.to_vec();
        r.extend([a, b]);
        r
    };
    lp.add_equality(row(&xs, 1.0, 0.0), x + em);
    lp.add_equality(row(&ys, 0.0, -1.0), y - ep);
    lp.add_equality(row(&vec![1.0; n], 0.0, 0.0), 1.0);
    lp.add_at_least(row(&xs, 0.0, 0.0), em);
    lp.add_at_least(row(&ys, 0.0, 0.0), ep);
    lp
}
