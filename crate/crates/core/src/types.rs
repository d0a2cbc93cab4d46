//! Domain model: DMUs, samples and run configuration.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{KamError, Result};

/// One decision making unit: a labelled pair of nonnegative input and output vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dmu {
    id: String,
    inputs: Vec<f64>,
    outputs: Vec<f64>,
}

impl Dmu {
    pub fn new(id: impl Into<String>, inputs: Vec<f64>, outputs: Vec<f64>) -> Result<Self> {
        let id = id.into();
        let invalid = |reason: &str| KamError::InvalidDmu {
            id: id.clone(),
            reason: reason.to_owned(),
        };
        if inputs.is_empty() || outputs.is_empty() {
            return Err(invalid("needs at least one input and one output"));
        }
        if inputs.iter().chain(&outputs).any(|v| !v.is_finite()) {
            return Err(invalid("entries must be finite"));
        }
        if inputs.iter().chain(&outputs).any(|&v| v < 0.0) {
            return Err(invalid("entries must be nonnegative"));
        }
        if !inputs.iter().any(|&v| v > 0.0) {
            return Err(invalid("all inputs are zero"));
        }
        if !outputs.iter().any(|&v| v > 0.0) {
            return Err(invalid("all outputs are zero"));
        }
        Ok(Self {
            id,
            inputs,
            outputs,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn inputs(&self) -> &[f64] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[f64] {
        &self.outputs
    }
}

/// A dimension-consistent, id-unique collection of DMUs. Order is significant
/// only for presentation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    dmus: Vec<Dmu>,
    #[serde(skip)]
    inputs: usize,
    #[serde(skip)]
    outputs: usize,
}

impl Sample {
    pub fn new(dmus: Vec<Dmu>) -> Result<Self> {
        let first = dmus
            .first()
            .ok_or_else(|| KamError::InvalidSample("sample is empty".into()))?;
        let (m, p) = (first.inputs.len(), first.outputs.len());
        let mut seen = HashSet::with_capacity(dmus.len());
        for dmu in &dmus {
            if dmu.inputs.len() != m || dmu.outputs.len() != p {
                return Err(KamError::InvalidSample(format!(
                    "DMU `{}` has {} inputs and {} outputs, expected {m} and {p}",
                    dmu.id,
                    dmu.inputs.len(),
                    dmu.outputs.len()
                )));
            }
            if !seen.insert(dmu.id.as_str()) {
                return Err(KamError::InvalidSample(format!(
                    "duplicate DMU id `{}`",
                    dmu.id
                )));
            }
        }
        Ok(Self {
            dmus,
            inputs: m,
            outputs: p,
        })
    }

    pub fn len(&self) -> usize {
        self.dmus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dmus.is_empty()
    }

    pub fn input_count(&self) -> usize {
        self.inputs
    }

    pub fn output_count(&self) -> usize {
        self.outputs
    }

    pub fn dmus(&self) -> &[Dmu] {
        &self.dmus
    }

    pub fn dmu(&self, index: usize) -> &Dmu {
        &self.dmus[index]
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.dmus.iter().position(|d| d.id == id)
    }

    /// The sample with the DMUs at `excluded` removed. Fails if nothing is left.
    pub fn without(&self, excluded: &[usize]) -> Result<Self> {
        let kept = self
            .dmus
            .iter()
            .enumerate()
            .filter(|(i, _)| !excluded.contains(i))
            .map(|(_, d)| d.clone())
            .collect();
        Self::new(kept)
    }

    /// Smallest strictly positive value of input `j` across the sample.
    pub fn min_positive_input(&self, j: usize) -> Option<f64> {
        min_positive(self.dmus.iter().map(|d| d.inputs[j]))
    }

    /// Smallest strictly positive value of output `k` across the sample.
    pub fn min_positive_output(&self, k: usize) -> Option<f64> {
        min_positive(self.dmus.iter().map(|d| d.outputs[k]))
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(KamError::InvalidSample(format!(
                "DMU index {index} out of range for a sample of {}",
                self.len()
            )))
        }
    }
}

fn min_positive(values: impl Iterator<Item = f64>) -> Option<f64> {
    values.filter(|&v| v > 0.0).min_by(f64::total_cmp)
}

/// How the degree-of-freedom perturbation applied to the evaluated DMU is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum EpsilonScheme {
    /// `rate` times the evaluated DMU's own values.
    Proportional {
        rate: f64,
    },
    /// Half the smallest positive value of each factor across the sample.
    AbsoluteHalfMin,
    Fixed {
        minus: Vec<f64>,
        plus: Vec<f64>,
    },
    Zero,
}

impl EpsilonScheme {
    /// The single number that names the scheme (`0.1` for "0.1-DF"), used by
    /// the delta rules. Heterogeneous fixed vectors have none.
    pub fn scalar(&self) -> Option<f64> {
        match self {
            EpsilonScheme::Proportional { rate } => Some(*rate),
            EpsilonScheme::AbsoluteHalfMin => Some(0.5),
            EpsilonScheme::Zero => Some(0.0),
            EpsilonScheme::Fixed { minus, plus } => {
                let first = minus.first().or(plus.first()).copied()?;
                minus
                    .iter()
                    .chain(plus)
                    .all(|&v| v == first)
                    .then_some(first)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            EpsilonScheme::Proportional { rate } if !(0.0..0.5).contains(rate) => {
                Err(KamError::Config(format!(
                    "proportional epsilon rate must lie in [0, 0.5), got {rate}"
                )))
            }
            EpsilonScheme::Fixed { minus, plus }
                if minus.iter().chain(plus).any(|v| !v.is_finite() || *v < 0.0) =>
            {
                Err(KamError::Config(
                    "fixed epsilon vectors must be finite and nonnegative".into(),
                ))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum WeightScheme {
    /// `1/x_lj` and `1/y_lk` of the evaluated DMU.
    ReciprocalOfEvaluated,
    Fixed {
        minus: Vec<f64>,
        plus: Vec<f64>,
    },
}

impl WeightScheme {
    fn validate(&self) -> Result<()> {
        match self {
            WeightScheme::Fixed { minus, plus }
                if minus
                    .iter()
                    .chain(plus)
                    .any(|v| !v.is_finite() || *v <= 0.0) =>
            {
                Err(KamError::Config(
                    "fixed weights must be finite and strictly positive".into(),
                ))
            }
            _ => Ok(()),
        }
    }
}

/// Tolerance `delta` for separating KAM-efficient from technically efficient DMUs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "value")]
pub enum DeltaRule {
    /// `epsilon / 10`
    TenthOfEpsilon,
    /// `epsilon / (m + p)`
    EpsilonOverFactors,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KamConfig {
    pub epsilon: EpsilonScheme,
    pub weights: WeightScheme,
    pub delta_rule: DeltaRule,
    pub lp_tolerance: f64,
    pub score_tolerance: f64,
}

impl Default for KamConfig {
    fn default() -> Self {
        Self {
            epsilon: EpsilonScheme::Proportional { rate: 0.1 },
            weights: WeightScheme::ReciprocalOfEvaluated,
            delta_rule: DeltaRule::TenthOfEpsilon,
            lp_tolerance: 1e-9,
            score_tolerance: 1e-7,
        }
    }
}

impl KamConfig {
    pub fn with_epsilon(&self, epsilon: EpsilonScheme) -> Self {
        Self {
            epsilon,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.epsilon.validate()?;
        self.weights.validate()?;
        if let DeltaRule::Fixed(d) = self.delta_rule {
            if !d.is_finite() || d < 0.0 {
                return Err(KamError::Config(format!(
                    "delta must be nonnegative, got {d}"
                )));
            }
        }
        for (name, t) in [("lp", self.lp_tolerance), ("score", self.score_tolerance)] {
            if !t.is_finite() || t <= 0.0 {
                return Err(KamError::Config(format!(
                    "{name} tolerance must be positive"
                )));
            }
        }
        Ok(())
    }

    /// Checks that vector-valued settings match the sample's dimensions.
    pub fn validate_for(&self, sample: &Sample) -> Result<()> {
        self.validate()?;
        let (m, p) = (sample.input_count(), sample.output_count());
        let check = |what: &str, minus: &[f64], plus: &[f64]| {
            if minus.len() != m || plus.len() != p {
                Err(KamError::Config(format!(
                    "fixed {what} vectors have lengths ({}, {}), sample needs ({m}, {p})",
                    minus.len(),
                    plus.len()
                )))
            } else {
                Ok(())
            }
        };
        if let EpsilonScheme::Fixed { minus, plus } = &self.epsilon {
            check("epsilon", minus, plus)?;
        }
        if let WeightScheme::Fixed { minus, plus } = &self.weights {
            check("weight", minus, plus)?;
        }
        Ok(())
    }

    /// The delta used by the efficiency classification.
    pub fn delta(&self, m: usize, p: usize) -> Result<f64> {
        let scalar = || {
            self.epsilon.scalar().ok_or_else(|| {
                KamError::Config(
                    "delta rule needs a scalar epsilon; use a fixed delta with heterogeneous epsilon vectors"
                        .into(),
                )
            })
        };
        match self.delta_rule {
            DeltaRule::TenthOfEpsilon => Ok(0.1 * scalar()?),
            DeltaRule::EpsilonOverFactors => Ok(scalar()? / (m + p) as f64),
            DeltaRule::Fixed(d) => Ok(d),
        }
    }
}

/// Input and output perturbation vectors for evaluating DMU `evaluated`.
pub fn resolve_epsilon(
    scheme: &EpsilonScheme,
    sample: &Sample,
    evaluated: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    sample.check_index(evaluated)?;
    let dmu = sample.dmu(evaluated);
    let (m, p) = (sample.input_count(), sample.output_count());
    match scheme {
        EpsilonScheme::Proportional { rate } => Ok((
            dmu.inputs.iter().map(|x| rate * x).collect(),
            dmu.outputs.iter().map(|y| rate * y).collect(),
        )),
        EpsilonScheme::AbsoluteHalfMin => {
            let minus = (0..m)
                .map(|j| {
                    sample
                        .min_positive_input(j)
                        .map(|v| 0.5 * v)
                        .ok_or_else(|| KamError::Config(format!("input {j} is zero for every DMU")))
                })
                .collect::<Result<_>>()?;
            let plus = (0..p)
                .map(|k| {
                    sample
                        .min_positive_output(k)
                        .map(|v| 0.5 * v)
                        .ok_or_else(|| {
                            KamError::Config(format!("output {k} is zero for every DMU"))
                        })
                })
                .collect::<Result<_>>()?;
            Ok((minus, plus))
        }
        EpsilonScheme::Fixed { minus, plus } => {
            if minus.len() != m || plus.len() != p {
                return Err(KamError::Config(format!(
                    "fixed epsilon vectors have lengths ({}, {}), sample needs ({m}, {p})",
                    minus.len(),
                    plus.len()
                )));
            }
            Ok((minus.clone(), plus.clone()))
        }
        EpsilonScheme::Zero => Ok((vec![0.0; m], vec![0.0; p])),
    }
}

/// Factor weights for evaluating DMU `evaluated`.
///
/// Under [`WeightScheme::ReciprocalOfEvaluated`] a zero-valued factor takes
/// the reciprocal of that factor's smallest positive value in the sample.
pub fn resolve_weights(
    scheme: &WeightScheme,
    sample: &Sample,
    evaluated: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    sample.check_index(evaluated)?;
    let dmu = sample.dmu(evaluated);
    let (m, p) = (sample.input_count(), sample.output_count());
    match scheme {
        WeightScheme::ReciprocalOfEvaluated => {
            // A factor that is zero for the evaluated DMU is positive for some
            // other DMU unless the whole column is zero; fall back to 1 then.
            let recip = |v: f64, fallback: Option<f64>| {
                if v > 0.0 {
                    1.0 / v
                } else {
                    fallback.map_or(1.0, |f| 1.0 / f)
                }
            };
            let minus = (0..m)
                .map(|j| recip(dmu.inputs[j], sample.min_positive_input(j)))
                .collect();
            let plus = (0..p)
                .map(|k| recip(dmu.outputs[k], sample.min_positive_output(k)))
                .collect();
            Ok((minus, plus))
        }
        WeightScheme::Fixed { minus, plus } => {
            if minus.len() != m || plus.len() != p {
                return Err(KamError::Config(format!(
                    "fixed weight vectors have lengths ({}, {}), sample needs ({m}, {p})",
                    minus.len(),
                    plus.len()
                )));
            }
            if !minus.iter().chain(plus).all(|&w| w.is_finite() && w > 0.0) {
                return Err(KamError::Config(
                    "fixed weights must be finite and strictly positive".into(),
                ));
            }
            Ok((minus.clone(), plus.clone()))
        }
    }
}
