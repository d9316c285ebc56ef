//! Base measures `ν`: the law of fresh colors.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::color::{Color, SetExpr};
use crate::error::{invalid, Result};

const PROB_SUM_TOL: f64 = 1e-12;

/// A diffuse law on `[0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum ContinuousLaw {
    /// Uniform on `[lo, hi] ⊆ [0,1]`.
    Uniform { lo: f64, hi: f64 },
    /// `F(x) = x^a`, a Beta(a, 1) law.
    Power { a: f64 },
}

impl ContinuousLaw {
    pub fn uniform() -> Self {
        ContinuousLaw::Uniform { lo: 0.0, hi: 1.0 }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ContinuousLaw::Uniform { lo, hi } => {
                if !(0.0 <= lo && lo < hi && hi <= 1.0) {
                    return Err(invalid(format!("uniform support [{lo},{hi}] must satisfy 0 <= lo < hi <= 1")));
                }
            }
            ContinuousLaw::Power { a } => {
                if !(a > 0.0 && a.is_finite()) {
                    return Err(invalid(format!("power law exponent {a} must be positive")));
                }
            }
        }
        Ok(())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            ContinuousLaw::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            ContinuousLaw::Power { a } => x.clamp(0.0, 1.0).powf(a),
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            ContinuousLaw::Uniform { lo, hi } => (lo + u * (hi - lo)).min(hi),
            ContinuousLaw::Power { a } => u.powf(1.0 / a),
        }
    }

    /// Mass of the interval part of `set`; endpoints carry no mass.
    pub fn measure(&self, set: &SetExpr) -> f64 {
        set.intervals()
            .iter()
            .map(|iv| self.cdf(iv.hi) - self.cdf(iv.lo))
            .sum::<f64>()
            .clamp(0.0, 1.0)
    }
}

/// A probability vector over labels `0..k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiscreteLaw {
    probs: Vec<f64>,
}

impl DiscreteLaw {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(invalid("discrete base needs at least one label"));
        }
        if probs.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
            return Err(invalid("discrete probabilities must be finite and nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(invalid(format!("discrete probabilities sum to {total}, not 1")));
        }
        Ok(DiscreteLaw { probs })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        Self::new(vec![1.0 / k as f64; k])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn measure(&self, set: &SetExpr) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(l, _)| set.label_set().contains(*l as u32))
            .map(|(_, p)| p)
            .sum()
    }

    fn sample_with(&self, u: f64) -> u32 {
        let mut acc = 0.0;
        for (l, p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return l as u32;
            }
        }
        // u landed in the rounding slack above the last cumulative sum
        self.probs.iter().rposition(|p| *p > 0.0).unwrap_or(0) as u32
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BaseMeasure {
    Discrete(DiscreteLaw),
    Continuous(ContinuousLaw),
    /// `weight · discrete + (1 − weight) · continuous`
    Mixture {
        weight: f64,
        discrete: DiscreteLaw,
        continuous: ContinuousLaw,
    },
}

impl BaseMeasure {
    pub fn uniform() -> Self {
        BaseMeasure::Continuous(ContinuousLaw::uniform())
    }

    pub fn discrete(probs: Vec<f64>) -> Result<Self> {
        Ok(BaseMeasure::Discrete(DiscreteLaw::new(probs)?))
    }

    pub fn continuous(law: ContinuousLaw) -> Result<Self> {
        law.validate()?;
        Ok(BaseMeasure::Continuous(law))
    }

    pub fn mixture(weight: f64, discrete: DiscreteLaw, continuous: ContinuousLaw) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(invalid(format!("mixture weight {weight} outside [0,1]")));
        }
        continuous.validate()?;
        Ok(BaseMeasure::Mixture {
            weight,
            discrete,
            continuous,
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BaseMeasure::Discrete(d) => DiscreteLaw::new(d.probs.clone()).map(|_| ()),
            BaseMeasure::Continuous(c) => c.validate(),
            BaseMeasure::Mixture {
                weight,
                discrete,
                continuous,
            } => Self::mixture(*weight, discrete.clone(), continuous.clone()).map(|_| ()),
        }
    }

    /// `ν(A)`.
    pub fn measure(&self, set: &SetExpr) -> f64 {
        match self {
            BaseMeasure::Discrete(d) => d.measure(set),
            BaseMeasure::Continuous(c) => c.measure(set),
            BaseMeasure::Mixture {
                weight,
                discrete,
                continuous,
            } => weight * discrete.measure(set) + (1.0 - weight) * continuous.measure(set),
        }
    }

    /// True when `ν` has no atoms.
    pub fn is_diffuse(&self) -> bool {
        match self {
            BaseMeasure::Discrete(_) => false,
            BaseMeasure::Continuous(_) => true,
            BaseMeasure::Mixture { weight, .. } => *weight == 0.0,
        }
    }

    pub fn num_labels(&self) -> usize {
        match self {
            BaseMeasure::Discrete(d) => d.len(),
            BaseMeasure::Continuous(_) => 0,
            BaseMeasure::Mixture { discrete, .. } => discrete.len(),
        }
    }

    pub fn has_continuous_part(&self) -> bool {
        match self {
            BaseMeasure::Discrete(_) => false,
            BaseMeasure::Continuous(_) => true,
            BaseMeasure::Mixture { weight, .. } => *weight < 1.0,
        }
    }

    /// Atoms of `ν` as `(label, ν({label}))`, zero-mass labels skipped.
    pub fn atoms(&self) -> Vec<(Color, f64)> {
        let (scale, law) = match self {
            BaseMeasure::Discrete(d) => (1.0, d),
            BaseMeasure::Continuous(_) => return Vec::new(),
            BaseMeasure::Mixture { weight, discrete, .. } => (*weight, discrete),
        };
        law.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p * scale > 0.0)
            .map(|(l, p)| (Color::Label(l as u32), p * scale))
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Color {
        match self {
            BaseMeasure::Discrete(d) => Color::Label(d.sample_with(rng.random())),
            BaseMeasure::Continuous(c) => Color::Point(c.quantile(rng.random())),
            BaseMeasure::Mixture {
                weight,
                discrete,
                continuous,
            } => {
                if rng.random::<f64>() < *weight {
                    Color::Label(discrete.sample_with(rng.random()))
                } else {
                    Color::Point(continuous.quantile(rng.random()))
                }
            }
        }
    }
}
