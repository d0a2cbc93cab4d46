//! Seeded one-input/one-output scenario generator with ground-truth labels.
//!
//! Clean DMUs sit on or below a power frontier `y = a x^b` with exponential
//! inefficiency. Spikes are placed above the frontier by a multiplicative
//! lift. NFDs ("near and far data") use several times the largest clean input
//! to produce only marginally more output than the sample's top producer.
//!
//! The random stream is ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`).
//! Uniform draws take the top 53 bits of `next_u64`; exponential draws are
//! `-ln(1 - u) / rate`. Transcendental functions come from `libm` rather
//! than the platform, so a seed gives the same bits everywhere. Changing any
//! of this changes every frozen fixture.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{KamError, Result};
use crate::types::{Dmu, Sample};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSpec {
    pub seed: u64,
    pub n_clean: usize,
    /// `a` in `y = a x^b`.
    pub frontier_scale: f64,
    /// `b` in `y = a x^b`, in `(0, 1]`.
    pub frontier_exponent: f64,
    pub x_range: (f64, f64),
    /// Rate of the exponential output shrinkage of clean DMUs.
    pub inefficiency_rate: f64,
    pub n_outlier_spikes: usize,
    pub n_nfd: usize,
    pub spike_lift: f64,
    /// NFD inputs are drawn uniformly from this multiple of the upper end of `x_range`.
    pub nfd_input_factor: (f64, f64),
    /// Largest relative output margin of an NFD over the top producer, in `(0, 0.05]`.
    pub nfd_output_gap: f64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            seed: 42,
            n_clean: 82,
            frontier_scale: 1.0,
            frontier_exponent: 0.5,
            x_range: (1.0, 10.0),
            inefficiency_rate: 2.0,
            n_outlier_spikes: 10,
            n_nfd: 8,
            spike_lift: 2.0,
            nfd_input_factor: (3.0, 5.0),
            nfd_output_gap: 0.05,
        }
    }
}

impl ScenarioSpec {
    pub fn frontier(&self, x: f64) -> f64 {
        self.frontier_scale * libm::pow(x, self.frontier_exponent)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(KamError::Generation(msg.to_owned()));
        let (low, high) = self.x_range;
        if !(low.is_finite() && high.is_finite() && low > 0.0 && high > low) {
            return fail("x_range must satisfy 0 < low < high");
        }
        if !(self.frontier_scale.is_finite() && self.frontier_scale > 0.0) {
            return fail("frontier scale must be positive");
        }
        if !(self.frontier_exponent > 0.0 && self.frontier_exponent <= 1.0) {
            return fail("frontier exponent must lie in (0, 1]");
        }
        if !(self.inefficiency_rate.is_finite() && self.inefficiency_rate > 0.0) {
            return fail("inefficiency rate must be positive");
        }
        if !(self.spike_lift.is_finite() && self.spike_lift > 1.0) {
            return fail("spike lift must exceed 1");
        }
        let (f_lo, f_hi) = self.nfd_input_factor;
        if !(f_lo.is_finite() && f_hi.is_finite() && f_lo >= 1.0 && f_hi >= f_lo) {
            return fail("NFD input factor must satisfy 1 <= low <= high");
        }
        if !(self.nfd_output_gap > 0.0 && self.nfd_output_gap <= 0.05) {
            return fail("NFD output gap must lie in (0, 0.05]");
        }
        if self.n_clean + self.n_outlier_spikes + self.n_nfd == 0 {
            return fail("scenario has no DMUs");
        }
        if self.n_nfd > 0 && self.n_clean + self.n_outlier_spikes == 0 {
            return fail("NFDs need at least one clean or spike DMU to sit next to");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Clean,
    Spike,
    Nfd,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledSample {
    pub sample: Sample,
    /// Ground truth, indexed like the sample.
    pub labels: Vec<Label>,
    /// Sample index of the top producer the NFDs were placed against.
    pub nfd_reference: Option<usize>,
}

impl LabeledSample {
    pub fn ids_with(&self, label: Label) -> Vec<&str> {
        self.labels
            .iter()
            .zip(self.sample.dmus())
            .filter(|(l, _)| **l == label)
            .map(|(_, d)| d.id())
            .collect()
    }
}

struct Stream(ChaCha8Rng);

impl Stream {
    fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn between(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.uniform()
    }

    fn exponential(&mut self, rate: f64) -> f64 {
        -libm::log(1.0 - self.uniform()) / rate
    }

    fn below(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }
}

pub fn generate(spec: &ScenarioSpec) -> Result<LabeledSample> {
    spec.validate()?;
    let mut rng = Stream(ChaCha8Rng::seed_from_u64(spec.seed));
    let (low, high) = spec.x_range;
    let mut points: Vec<(f64, f64, Label)> = Vec::new();

    for _ in 0..spec.n_clean {
        let x = rng.between(low, high);
        let shrink = rng.exponential(spec.inefficiency_rate);
        points.push((x, spec.frontier(x) * libm::exp(-shrink), Label::Clean));
    }
    for _ in 0..spec.n_outlier_spikes {
        let x = rng.between(low, high);
        points.push((x, spec.frontier(x) * spec.spike_lift, Label::Spike));
    }

    let reference = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i);
    if let Some(r) = reference {
        let (x_ref, y_ref, _) = points[r];
        let (f_lo, f_hi) = spec.nfd_input_factor;
        let reach = f_hi * high - x_ref;
        for _ in 0..spec.n_nfd {
            let x = high * rng.between(f_lo, f_hi);
            // Concave in x so that every NFD stays on the frontier.
            let margin = spec.nfd_output_gap * ((x - x_ref) / reach).clamp(0.0, 1.0).sqrt();
            points.push((x, y_ref * (1.0 + margin), Label::Nfd));
        }
    }

    // Fisher-Yates so that labels cannot be read off the sample order.
    let mut order: Vec<usize> = (0..points.len()).collect();
    for i in (1..order.len()).rev() {
        let j = rng.below(i + 1);
        order.swap(i, j);
    }

    let width = points.len().to_string().len().max(3);
    let mut dmus = Vec::with_capacity(points.len());
    let mut labels = Vec::with_capacity(points.len());
    let mut nfd_reference = None;
    for (pos, &src) in order.iter().enumerate() {
        let (x, y, label) = points[src];
        if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
            return Err(KamError::Generation(format!(
                "non-positive coordinate ({x}, {y}) generated"
            )));
        }
        if Some(src) == reference && spec.n_nfd > 0 {
            nfd_reference = Some(pos);
        }
        dmus.push(Dmu::new(format!("D{:0width$}", pos + 1), vec![x], vec![y])?);
        labels.push(label);
    }
    Ok(LabeledSample {
        sample: Sample::new(dmus)?,
        labels,
        nfd_reference,
    })
}
