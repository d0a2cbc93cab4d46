//! Linear and non-linear KAM for a single evaluated DMU.
//!
//! The linear program maximizes the weighted slack sum around the evaluated
//! DMU shifted by `epsilon` (inputs up, outputs down), subject to the convexity
//! constraint `sum(lambda) = 1`. From its optimum three targets are derived
//! (highest, best technical, lowest) together with their efficiency scores
//! and the sensitivity score `highest / lowest`.
//!
//! The optimal `lambda` is not unique in general; only the slacks enter the
//! targets and scores.

use serde::Serialize;

use crate::error::{KamError, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus};
use crate::types::{resolve_epsilon, resolve_weights, EpsilonScheme, KamConfig, Sample};

const DINKELBACH_TOL: f64 = 1e-8;
const DINKELBACH_MAX_ITER: usize = 100;
// Relative floor under which a target's weighted aggregate counts as zero.
const ZERO_AGGREGATE: f64 = 1e-12;

/// Optimum of the linear program for one evaluated DMU.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KamSolution {
    pub evaluated: usize,
    pub epsilon_minus: Vec<f64>,
    pub epsilon_plus: Vec<f64>,
    pub weights_minus: Vec<f64>,
    pub weights_plus: Vec<f64>,
    pub slack_minus: Vec<f64>,
    pub slack_plus: Vec<f64>,
    pub lambda: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetPoint {
    pub inputs: Vec<f64>,
    pub outputs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KamTargets {
    pub highest: TargetPoint,
    pub best_technical: TargetPoint,
    pub lowest: TargetPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KamScores {
    pub ka_hat: f64,
    pub ka_star: f64,
    pub ka_tilde: f64,
    pub sensitivity: f64,
    /// Best technical score of the same DMU at zero epsilon, when computed.
    pub ka_zero: Option<f64>,
    /// Non-linear KAM score, when computed.
    pub ka_nonlinear: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EfficiencyKind {
    KamEfficient,
    Inefficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyClass {
    pub kind: EfficiencyKind,
    pub delta_used: f64,
    /// `ka_zero - ka_eps`
    pub gap: f64,
}

/// Solves the linear KAM program for DMU `evaluated`.
pub fn solve_linear_kam(
    sample: &Sample,
    evaluated: usize,
    config: &KamConfig,
) -> Result<KamSolution> {
    config.validate_for(sample)?;
    let (eps_minus, eps_plus) = resolve_epsilon(&config.epsilon, sample, evaluated)?;
    let (w_minus, w_plus) = resolve_weights(&config.weights, sample, evaluated)?;
    let (n, m, p) = (sample.len(), sample.input_count(), sample.output_count());
    let dmu = sample.dmu(evaluated);
    let nvars = n + m + p;

    // Variable layout: lambda (n), s- (m), s+ (p).
    let mut objective = vec![0.0; nvars];
    objective[n..n + m].copy_from_slice(&w_minus);
    objective[n + m..].copy_from_slice(&w_plus);
    let mut lp = LinearProgram::maximize(objective);
    for j in 0..m {
        let mut row: Vec<f64> = sample.dmus().iter().map(|d| d.inputs()[j]).collect();
        row.resize(nvars, 0.0);
        row[n + j] = 1.0;
        lp.add_equality(row, dmu.inputs()[j] + eps_minus[j]);
    }
    for k in 0..p {
        let mut row: Vec<f64> = sample.dmus().iter().map(|d| d.outputs()[k]).collect();
        row.resize(nvars, 0.0);
        row[n + m + k] = -1.0;
        lp.add_equality(row, dmu.outputs()[k] - eps_plus[k]);
    }
    let mut convexity = vec![1.0; n];
    convexity.resize(nvars, 0.0);
    lp.add_equality(convexity, 1.0);
    // x_lj - s-_j >= 0
    for j in 0..m {
        let mut row = vec![0.0; nvars];
        row[n + j] = -1.0;
        lp.add_at_least(row, -dmu.inputs()[j]);
    }
    // y_lk + s+_k - 2 eps+_k >= 0
    for k in 0..p {
        let mut row = vec![0.0; nvars];
        row[n + m + k] = 1.0;
        lp.add_at_least(row, 2.0 * eps_plus[k] - dmu.outputs()[k]);
    }

    let solution = solve_lp(&lp, config.lp_tolerance).map_err(|source| KamError::Solver {
        dmu: dmu.id().to_owned(),
        source,
    })?;
    match solution.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(KamError::Infeasible {
                dmu: dmu.id().to_owned(),
            })
        }
        LpStatus::Unbounded => {
            return Err(KamError::Unbounded {
                dmu: dmu.id().to_owned(),
            })
        }
    }
    let z = solution.values;
    Ok(KamSolution {
        evaluated,
        epsilon_minus: eps_minus,
        epsilon_plus: eps_plus,
        weights_minus: w_minus,
        weights_plus: w_plus,
        slack_minus: z[n..n + m].to_vec(),
        slack_plus: z[n + m..].to_vec(),
        lambda: z[..n].to_vec(),
        objective: solution.objective,
    })
}

pub fn compute_targets(solution: &KamSolution, sample: &Sample) -> KamTargets {
    let dmu = sample.dmu(solution.evaluated);
    let target = |shift: f64| TargetPoint {
        inputs: dmu
            .inputs()
            .iter()
            .zip(&solution.slack_minus)
            .zip(&solution.epsilon_minus)
            .map(|((x, s), e)| x - s + shift * e)
            .collect(),
        outputs: dmu
            .outputs()
            .iter()
            .zip(&solution.slack_plus)
            .zip(&solution.epsilon_plus)
            .map(|((y, s), e)| y + s - shift * e)
            .collect(),
    };
    KamTargets {
        highest: target(0.0),
        best_technical: target(1.0),
        lowest: target(2.0),
    }
}

/// Efficiency scores of the evaluated DMU against its three targets.
///
/// Each score is the evaluated DMU's weighted output/input ratio divided by
/// the same ratio at the target.
pub fn compute_scores(
    solution: &KamSolution,
    targets: &KamTargets,
    sample: &Sample,
) -> Result<KamScores> {
    let dmu = sample.dmu(solution.evaluated);
    let (wm, wp) = (&solution.weights_minus, &solution.weights_plus);
    let own_in = dot(wm, dmu.inputs());
    let own_out = dot(wp, dmu.outputs());
    let degenerate = |reason: String| KamError::DegenerateScore {
        dmu: dmu.id().to_owned(),
        reason,
    };
    if own_in <= 0.0 || own_out <= 0.0 {
        return Err(degenerate(
            "evaluated DMU has a zero weighted aggregate".into(),
        ));
    }
    let floor_in = own_in * ZERO_AGGREGATE;
    let floor_out = own_out * ZERO_AGGREGATE;
    let score = |name: &str, t: &TargetPoint| -> Result<f64> {
        let t_in = dot(wm, &t.inputs);
        let t_out = dot(wp, &t.outputs);
        if t_in <= floor_in || t_out <= floor_out {
            return Err(degenerate(format!(
                "{name} target has a zero weighted input or output aggregate"
            )));
        }
        Ok((own_out * t_in) / (own_in * t_out))
    };
    let ka_hat = score("highest", &targets.highest)?;
    let ka_star = score("best technical", &targets.best_technical)?;
    let ka_tilde = score("lowest", &targets.lowest)?;
    Ok(KamScores {
        ka_hat,
        ka_star,
        ka_tilde,
        sensitivity: ka_hat / ka_tilde,
        ka_zero: None,
        ka_nonlinear: None,
    })
}

/// Splits technically efficient DMUs into KAM-efficient and inefficient ones
/// by comparing the zero-epsilon and epsilon best technical scores.
pub fn classify_efficiency(
    ka_zero: f64,
    ka_eps: f64,
    config: &KamConfig,
    m: usize,
    p: usize,
) -> Result<EfficiencyClass> {
    let delta = config.delta(m, p)?;
    let gap = ka_zero - ka_eps;
    let technically_efficient = ka_zero >= 1.0 - config.score_tolerance;
    let kind = if technically_efficient && gap <= delta + config.score_tolerance {
        EfficiencyKind::KamEfficient
    } else {
        EfficiencyKind::Inefficient
    };
    Ok(EfficiencyClass {
        kind,
        delta_used: delta,
        gap,
    })
}

/// Non-linear KAM score of DMU `evaluated`, found by Dinkelbach iteration
/// started from the ratio at the self point, which is 1.
pub fn solve_nonlinear_kam(sample: &Sample, evaluated: usize, config: &KamConfig) -> Result<f64> {
    config.validate_for(sample)?;
    nonlinear_from(sample, evaluated, config, 1.0)
}

fn nonlinear_from(
    sample: &Sample,
    evaluated: usize,
    config: &KamConfig,
    start: f64,
) -> Result<f64> {
    let (eps_minus, eps_plus) = resolve_epsilon(&config.epsilon, sample, evaluated)?;
    let (w_minus, w_plus) = resolve_weights(&config.weights, sample, evaluated)?;
    let (n, m, p) = (sample.len(), sample.input_count(), sample.output_count());
    let dmu = sample.dmu(evaluated);
    let id = || dmu.id().to_owned();

    let agg_in = dot(&w_minus, dmu.inputs());
    let agg_out = dot(&w_plus, dmu.outputs());
    let big_w_minus: Vec<f64> = w_minus.iter().map(|w| w / agg_in).collect();
    let big_w_plus: Vec<f64> = w_plus.iter().map(|w| w / agg_out).collect();
    let big_e_minus: Vec<f64> = eps_minus.iter().zip(&w_minus).map(|(e, w)| e / w).collect();
    let big_e_plus: Vec<f64> = eps_plus.iter().zip(&w_plus).map(|(e, w)| e / w).collect();

    let nvars = n + m + p;
    let numerator = |z: &[f64]| {
        1.0 + (0..m)
            .map(|j| big_w_minus[j] * (big_e_minus[j] - z[n + j]))
            .sum::<f64>()
    };
    let denominator = |z: &[f64]| {
        1.0 + (0..p)
            .map(|k| big_w_plus[k] * (z[n + m + k] - big_e_plus[k]))
            .sum::<f64>()
    };

    let mut q = start;
    let mut last_gap = f64::INFINITY;
    for _ in 0..DINKELBACH_MAX_ITER {
        // min N(z) - q D(z)  <=>  max sum W- s- + q sum W+ s+ (constants dropped)
        let mut objective = vec![0.0; nvars];
        objective[n..n + m].copy_from_slice(&big_w_minus);
        for k in 0..p {
            objective[n + m + k] = q * big_w_plus[k];
        }
        let mut lp = LinearProgram::maximize(objective);
        for j in 0..m {
            let mut row: Vec<f64> = sample.dmus().iter().map(|d| d.inputs()[j]).collect();
            row.resize(nvars, 0.0);
            row[n + j] = 1.0;
            lp.add_equality(row, dmu.inputs()[j] + big_e_minus[j]);
        }
        for k in 0..p {
            let mut row: Vec<f64> = sample.dmus().iter().map(|d| d.outputs()[k]).collect();
            row.resize(nvars, 0.0);
            row[n + m + k] = -1.0;
            lp.add_equality(row, dmu.outputs()[k] - big_e_plus[k]);
        }
        let mut convexity = vec![1.0; n];
        convexity.resize(nvars, 0.0);
        lp.add_equality(convexity, 1.0);

        let sol = solve_lp(&lp, config.lp_tolerance)
            .map_err(|source| KamError::Solver { dmu: id(), source })?;
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => return Err(KamError::Infeasible { dmu: id() }),
            LpStatus::Unbounded => return Err(KamError::Unbounded { dmu: id() }),
        }
        let (num, den) = (numerator(&sol.values), denominator(&sol.values));
        if den <= 0.0 {
            return Err(KamError::DegenerateScore {
                dmu: id(),
                reason: "non-linear denominator is not positive".into(),
            });
        }
        let gap = num - q * den;
        if gap.abs() <= DINKELBACH_TOL {
            return Ok(num / den);
        }
        q = num / den;
        last_gap = gap;
    }
    Err(KamError::NotConverged {
        dmu: id(),
        iterations: DINKELBACH_MAX_ITER,
        gap: last_gap,
    })
}

/// Solution, targets and scores of one program.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KamOutcome {
    pub solution: KamSolution,
    pub targets: KamTargets,
    pub scores: KamScores,
}

/// Everything computed for one DMU: the zero-epsilon run, the configured
/// epsilon run, and the resulting classification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DmuEvaluation {
    pub zero: KamOutcome,
    pub eps: KamOutcome,
    pub class: EfficiencyClass,
}

fn outcome(sample: &Sample, evaluated: usize, config: &KamConfig) -> Result<KamOutcome> {
    let solution = solve_linear_kam(sample, evaluated, config)?;
    let targets = compute_targets(&solution, sample);
    let scores = compute_scores(&solution, &targets, sample)?;
    Ok(KamOutcome {
        solution,
        targets,
        scores,
    })
}

/// Runs the zero-epsilon and configured-epsilon programs for one DMU and
/// classifies it. Both runs share the weight scheme.
pub fn evaluate_dmu(
    sample: &Sample,
    evaluated: usize,
    config: &KamConfig,
    nonlinear: bool,
) -> Result<DmuEvaluation> {
    let mut zero = outcome(sample, evaluated, &config.with_epsilon(EpsilonScheme::Zero))?;
    let mut eps = outcome(sample, evaluated, config)?;
    let ka_zero = zero.scores.ka_star;
    zero.scores.ka_zero = Some(ka_zero);
    eps.scores.ka_zero = Some(ka_zero);
    if nonlinear {
        eps.scores.ka_nonlinear = Some(nonlinear_from(
            sample,
            evaluated,
            config,
            eps.scores.ka_star,
        )?);
    }
    let class = classify_efficiency(
        ka_zero,
        eps.scores.ka_star,
        config,
        sample.input_count(),
        sample.output_count(),
    )?;
    Ok(DmuEvaluation { zero, eps, class })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
