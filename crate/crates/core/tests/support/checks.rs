//! Checks on engine results, shared by the property and acceptance suites.

use kam_core::{
    compute_scores, compute_targets, solve_linear_kam, KamConfig, KamError, KamScores, KamSolution,
    Sample, TargetPoint,
};

pub fn weighted(w: &[f64], v: &[f64]) -> f64 {
    w.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Linear scores of DMU `l`, or `None` when a target sits on a zero
/// aggregate. That case is checked here against the solution itself rather
/// than taken on trust.
pub fn linear(sample: &Sample, l: usize, config: &KamConfig) -> (KamSolution, Option<KamScores>) {
    let sol = solve_linear_kam(sample, l, config).unwrap();
    let targets = compute_targets(&sol, sample);
    match compute_scores(&sol, &targets, sample) {
        Ok(scores) => (sol, Some(scores)),
        Err(KamError::DegenerateScore { .. }) => {
            let dmu = sample.dmu(l);
            let own_in = weighted(&sol.weights_minus, dmu.inputs());
            let own_out = weighted(&sol.weights_plus, dmu.outputs());
            let flat = |t: &TargetPoint| {
                weighted(&sol.weights_minus, &t.inputs) <= 1e-9 * own_in
                    || weighted(&sol.weights_plus, &t.outputs) <= 1e-9 * own_out
            };
            assert!(
                flat(&targets.highest) || flat(&targets.lowest),
                "degenerate score reported without a zero aggregate: {targets:?}"
            );
            (sol, None)
        }
        Err(e) => panic!("{e}"),
    }
}

/// Largest violation of the program's constraints by a returned solution.
pub fn violation(sample: &Sample, sol: &KamSolution) -> f64 {
    let dmu = sample.dmu(sol.evaluated);
    let mut worst: f64 = (sol.lambda.iter().sum::<f64>() - 1.0).abs();
    for v in sol
        .lambda
        .iter()
        .chain(&sol.slack_minus)
        .chain(&sol.slack_plus)
    {
        worst = worst.max(-v);
    }
    for j in 0..sample.input_count() {
        let hull: f64 = sample
            .dmus()
            .iter()
            .zip(&sol.lambda)
            .map(|(d, l)| l * d.inputs()[j])
            .sum();
        let x = dmu.inputs()[j];
        let scale = 1.0 + x;
        worst = worst.max((hull + sol.slack_minus[j] - x - sol.epsilon_minus[j]).abs() / scale);
        worst = worst.max((sol.slack_minus[j] - x) / scale);
    }
    for k in 0..sample.output_count() {
        let hull: f64 = sample
            .dmus()
            .iter()
            .zip(&sol.lambda)
            .map(|(d, l)| l * d.outputs()[k])
            .sum();
        let y = dmu.outputs()[k];
        let scale = 1.0 + y;
        worst = worst.max((hull - sol.slack_plus[k] - y + sol.epsilon_plus[k]).abs() / scale);
        worst = worst.max((2.0 * sol.epsilon_plus[k] - y - sol.slack_plus[k]) / scale);
    }
    worst
}
