//! The reinforced urn: predictive rule, sampling step, and trajectory recording.
//!
//! After `n` draws the predictive law of the next color is
//!
//! ```text
//! P_n = (θ·ν + Σ_i W_i·δ_{X_i}) / (θ + Σ_i W_i)
//! ```
//!
//! Repeated colors are aggregated into a single atom carrying the summed
//! weight, the draw count, and the summed squared weight.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::base::BaseMeasure;
use crate::color::{Color, SetExpr};
use crate::error::{invalid, Error, Result};
use crate::index::{IndexKind, SampleIndex};
use crate::rng::ReplicateStreams;
use crate::stats::{total_variation, MeasureRepr};
use crate::weights::WeightModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbabilityKind {
    Predictive,
    Empirical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub color: Color,
    /// Σ W_i over draws of this color.
    pub mass: f64,
    pub count: u64,
    /// Σ W_i² over draws of this color.
    pub sum_w2: f64,
}

#[derive(Debug, Clone)]
pub struct UrnState {
    theta: f64,
    base: Arc<BaseMeasure>,
    atoms: Vec<Atom>,
    slots: HashMap<Color, usize>,
    total: f64,
    n: u64,
    sum_w: f64,
    sum_w2: f64,
    index: SampleIndex,
}

impl UrnState {
    pub fn new(theta: f64, base: impl Into<Arc<BaseMeasure>>) -> Result<Self> {
        Self::with_index(theta, base, IndexKind::Fenwick)
    }

    pub fn with_index(theta: f64, base: impl Into<Arc<BaseMeasure>>, kind: IndexKind) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(invalid(format!("prior mass theta = {theta} must be positive")));
        }
        Ok(UrnState {
            theta,
            base: base.into(),
            atoms: Vec::new(),
            slots: HashMap::new(),
            total: theta,
            n: 0,
            sum_w: 0.0,
            sum_w2: 0.0,
            index: SampleIndex::new(kind),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn base(&self) -> &Arc<BaseMeasure> {
        &self.base
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, color: &Color) -> Option<&Atom> {
        self.slots.get(color).map(|&s| &self.atoms[s])
    }

    /// `N_n = θ + Σ W_i`.
    pub fn total_mass(&self) -> f64 {
        self.total
    }

    pub fn steps(&self) -> u64 {
        self.n
    }

    pub fn sum_w(&self) -> f64 {
        self.sum_w
    }

    pub fn sum_w2(&self) -> f64 {
        self.sum_w2
    }

    /// `L_n`, the number of distinct colors observed.
    pub fn distinct(&self) -> usize {
        self.atoms.len()
    }

    pub fn index(&self) -> &SampleIndex {
        &self.index
    }

    pub fn predictive_probability(&self, set: &SetExpr) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|a| set.contains(&a.color))
            .map(|a| a.mass)
            .sum();
        ((self.theta * self.base.measure(set) + atoms) / self.total).clamp(0.0, 1.0)
    }

    pub fn empirical_probability(&self, set: &SetExpr) -> Result<f64> {
        if self.n == 0 {
            return Err(Error::EmptyHistory);
        }
        let hits: u64 = self
            .atoms
            .iter()
            .filter(|a| set.contains(&a.color))
            .map(|a| a.count)
            .sum();
        Ok(hits as f64 / self.n as f64)
    }

    pub fn probability(&self, set: &SetExpr, kind: ProbabilityKind) -> Result<f64> {
        match kind {
            ProbabilityKind::Predictive => Ok(self.predictive_probability(set)),
            ProbabilityKind::Empirical => self.empirical_probability(set),
        }
    }

    /// `P(A | C) = P(A ∩ C) / P(C)` under the chosen law.
    pub fn conditional_probability(&self, a: &SetExpr, c: &SetExpr, kind: ProbabilityKind) -> Result<f64> {
        let denom = self.probability(c, kind)?;
        if denom <= 0.0 {
            return Err(Error::NullConditioning);
        }
        Ok((self.probability(&a.intersection(c), kind)? / denom).clamp(0.0, 1.0))
    }

    /// Records a draw of `color` reinforced by `weight`.
    pub fn observe(&mut self, color: Color, weight: f64) {
        debug_assert!(weight >= 0.0);
        match self.slots.get(&color) {
            Some(&slot) => self.reinforce(slot, weight),
            None => {
                let slot = self.index.insert(weight);
                debug_assert_eq!(slot, self.atoms.len());
                self.atoms.push(Atom {
                    color,
                    mass: weight,
                    count: 1,
                    sum_w2: weight * weight,
                });
                self.slots.insert(color, slot);
            }
        }
        self.tally(weight);
    }

    fn reinforce(&mut self, slot: usize, weight: f64) {
        let atom = &mut self.atoms[slot];
        atom.mass += weight;
        atom.count += 1;
        atom.sum_w2 += weight * weight;
        self.index.add_mass(slot, weight);
    }

    fn tally(&mut self, weight: f64) {
        self.total += weight;
        self.sum_w += weight;
        self.sum_w2 += weight * weight;
        self.n += 1;
    }

    /// Draws the next color from `P_n`, reinforces it, and returns `(color, weight)`.
    ///
    /// Color selection consumes `color_rng` only; the reinforcement consumes
    /// exactly one value of `noise_rng`.
    pub fn step<C: Rng + ?Sized, N: Rng + ?Sized>(
        &mut self,
        model: &WeightModel,
        color_rng: &mut C,
        noise_rng: &mut N,
    ) -> (Color, f64) {
        let u = color_rng.random::<f64>() * self.total;
        let slot = if u < self.theta { None } else { self.index.sample_atom(u - self.theta) };
        match slot {
            Some(slot) => {
                let color = self.atoms[slot].color;
                let weight = model.weight(&color, noise_rng.random());
                self.reinforce(slot, weight);
                self.tally(weight);
                (color, weight)
            }
            None => {
                let color = self.base.sample(color_rng);
                let weight = model.weight(&color, noise_rng.random());
                self.observe(color, weight);
                (color, weight)
            }
        }
    }

    pub fn step_with(&mut self, model: &WeightModel, streams: &mut ReplicateStreams) -> (Color, f64) {
        self.step(model, &mut streams.color, &mut streams.noise)
    }

    pub fn advance(&mut self, model: &WeightModel, steps: u64, streams: &mut ReplicateStreams) {
        for _ in 0..steps {
            self.step_with(model, streams);
        }
    }

    /// Advances `n_steps` and records statistics after each checkpoint step.
    ///
    /// Checkpoints count steps from the start of this call and must be
    /// strictly increasing, positive, and at most `n_steps`.
    pub fn run(
        &mut self,
        model: &WeightModel,
        n_steps: u64,
        checkpoints: &[u64],
        probes: &[SetExpr],
        streams: &mut ReplicateStreams,
    ) -> Result<Trajectory> {
        if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("checkpoints must be strictly increasing"));
        }
        if checkpoints.first() == Some(&0) || checkpoints.last().is_some_and(|&c| c > n_steps) {
            return Err(invalid(format!("checkpoints must lie in 1..={n_steps}")));
        }
        let mut out = Trajectory::default();
        let mut done = 0;
        for &cp in checkpoints {
            self.advance(model, cp - done, streams);
            done = cp;
            out.checkpoints.push(self.checkpoint(probes)?);
        }
        self.advance(model, n_steps - done, streams);
        Ok(out)
    }

    pub fn checkpoint(&self, probes: &[SetExpr]) -> Result<Checkpoint> {
        let n = self.n as f64;
        let probes = probes
            .iter()
            .map(|a| {
                Ok(ProbeValue {
                    predictive: self.predictive_probability(a),
                    empirical: self.empirical_probability(a)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let tv = total_variation(&MeasureRepr::predictive(self), &MeasureRepr::empirical(self)?)?;
        Ok(Checkpoint {
            n: self.n,
            probes,
            total_over_n: self.total / n,
            sum_w_over_n: self.sum_w / n,
            distinct: self.distinct(),
            sum_w2_over_n: self.sum_w2 / n,
            tv_pred_emp: tv,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeValue {
    pub predictive: f64,
    pub empirical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checkpoint {
    pub n: u64,
    pub probes: Vec<ProbeValue>,
    /// `N_n / n`
    pub total_over_n: f64,
    pub sum_w_over_n: f64,
    /// `L_n`
    pub distinct: usize,
    pub sum_w2_over_n: f64,
    pub tv_pred_emp: f64,
}

impl Checkpoint {
    /// `L_n / log n`, undefined below `n = 2`.
    pub fn distinct_ratio(&self) -> Option<f64> {
        (self.n >= 2).then(|| self.distinct as f64 / (self.n as f64).ln())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Trajectory {
    pub checkpoints: Vec<Checkpoint>,
}

/// Log-spaced checkpoints `⌈start·ratio^j⌉ ≤ n_max`, always ending at `n_max`.
pub fn geometric_checkpoints(start: u64, ratio: f64, n_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    if n_max == 0 {
        return out;
    }
    let start = start.max(1);
    let ratio = if ratio > 1.0 { ratio } else { 2.0 };
    let mut j = 0;
    loop {
        // Round before ceil so that e.g. 1000·√10² lands on 10000, not 10001.
        let raw = start as f64 * ratio.powi(j);
        let c = ((raw * 1e9).round() / 1e9).ceil() as u64;
        if c >= n_max {
            break;
        }
        if out.last() != Some(&c) {
            out.push(c);
        }
        j += 1;
    }
    out.push(n_max);
    out
}
