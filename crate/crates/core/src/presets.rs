//! Named model configurations drawn from the worked examples.

use serde::Serialize;

use crate::base::BaseMeasure;
use crate::error::{invalid, Result};
use crate::weights::{NoiseSpec, WeightModel};

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub theta: f64,
    pub model: WeightModel,
    pub base: BaseMeasure,
}

/// What a preset supports, for catalogs.
#[derive(Debug, Clone, Serialize)]
pub struct PresetInfo {
    pub name: String,
    pub summary: String,
    pub model: String,
    pub theta: f64,
    pub w_bar: f64,
    pub w_bar_c: f64,
    pub dominant: String,
    pub gamma: f64,
    pub suites: Vec<&'static str>,
}

impl Preset {
    /// Suites whose hypotheses the preset meets.
    pub fn suites(&self) -> Vec<&'static str> {
        let mut out = vec!["convergence"];
        let report = self.model.validate(&self.base);
        let has_complement = !self.model.dominant().complement().is_empty();
        if has_complement && self.model.gamma() > 0.0 && report.is_dps() {
            out.push("rates");
            if self.model.clt_hypothesis() {
                out.push("clt");
                if self.model.is_continuous() || self.base.has_continuous_part() {
                    out.push("coverage");
                }
            }
        }
        out
    }

    pub fn info(&self) -> PresetInfo {
        PresetInfo {
            name: self.name.to_string(),
            summary: self.summary.to_string(),
            model: self.model.to_string(),
            theta: self.theta,
            w_bar: self.model.w_bar(),
            w_bar_c: self.model.w_bar_c(),
            dominant: self.model.dominant().to_string(),
            gamma: self.model.gamma(),
            suites: self.suites(),
        }
    }
}

fn build(name: &'static str) -> Result<Preset> {
    use NoiseSpec::*;
    let uniform = BaseMeasure::uniform;
    let p = match name {
        "polya" => Preset {
            name,
            summary: "classical Pólya sequence: unit weights, uniform base",
            theta: 1.0,
            model: WeightModel::constant(1.0, Deterministic, 1.0)?,
            base: uniform(),
        },
        "constant-bernoulli" => Preset {
            name,
            summary: "constant mean 2 with two-point weights {0, 3}",
            theta: 1.0,
            model: WeightModel::constant(2.0, BernoulliScaled, 3.0)?,
            base: uniform(),
        },
        "kcolor-default" => Preset {
            name,
            summary: "3-color randomly reinforced urn with two dominant colors",
            theta: 1.0,
            model: WeightModel::k_color_rru(vec![2.0, 2.0, 1.0], BoundedMultiplicative { rho: 0.5 }, 3.0)?,
            base: BaseMeasure::discrete(vec![1.0 / 3.0; 3])?,
        },
        "monotone-default" => Preset {
            name,
            summary: "strictly increasing mean weight 1 + x",
            theta: 1.0,
            model: WeightModel::monotone(1.0, 2.0, Deterministic, 2.0)?,
            base: uniform(),
        },
        "unimodal-default" => Preset {
            name,
            summary: "tent-shaped mean weight with a unique dominant color at 0.6",
            theta: 1.0,
            model: WeightModel::unimodal(0.6, 2.0, 1.0, Deterministic, 2.0)?,
            base: uniform(),
        },
        "species-default" => Preset {
            name,
            summary: "new species on [0.5,1] reinforced twice as strongly",
            theta: 1.0,
            model: WeightModel::step_species(1.0, 2.0, 0.5, Deterministic, 2.0)?,
            base: uniform(),
        },
        "species-clt" => Preset {
            name,
            summary: "species model with dominance gap w > 2 w^c and two-point weights",
            theta: 1.0,
            model: WeightModel::step_species(1.0, 2.5, 0.5, BernoulliScaled, 3.0)?,
            base: uniform(),
        },
        other => return Err(invalid(format!("unknown preset '{other}'"))),
    };
    Ok(p)
}

pub const PRESET_NAMES: [&str; 7] = [
    "polya",
    "constant-bernoulli",
    "kcolor-default",
    "monotone-default",
    "unimodal-default",
    "species-default",
    "species-clt",
];

pub fn preset(name: &str) -> Result<Preset> {
    match PRESET_NAMES.iter().find(|p| **p == name) {
        Some(p) => build(p),
        None => Err(invalid(format!(
            "unknown preset '{name}' (known: {})",
            PRESET_NAMES.join(", ")
        ))),
    }
}

pub fn catalog() -> Vec<Preset> {
    PRESET_NAMES.iter().map(|n| build(n).expect("built-in presets are valid")).collect()
}
