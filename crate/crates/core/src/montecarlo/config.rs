//! Experiment configuration: a serde model of the `[model]`, `[base]`,
//! `[run]` and `[thresholds]` tables, and its validation into a runnable
//! [`Experiment`].

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::base::{BaseMeasure, ContinuousLaw, DiscreteLaw};
use crate::color::SetExpr;
use crate::index::IndexKind;
use crate::presets::preset;
use crate::urn::geometric_checkpoints;
use crate::weights::{MeanFunction, NoiseSpec, WeightModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Supplies `[model]` and `[base]` when those tables are absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<BaseSpec>,
    pub run: RunSpec,
    #[serde(default)]
    pub thresholds: Thresholds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Constant,
    KColor,
    Monotone,
    Unimodal,
    StepSpecies,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    #[default]
    Deterministic,
    BoundedMultiplicative,
    BernoulliScaled,
}

/// `[model]`: one flat table; which keys are required depends on `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_bar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub means: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<f64>,
    #[serde(default)]
    pub noise: NoiseKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseKind {
    Uniform,
    Power,
    Discrete,
    Mixture,
}

/// `[base]`: prior mass and the base measure. A mixture takes `weight` and
/// `probs` for its atoms and `a` (power law) or `lo`/`hi` (uniform) for its
/// diffuse part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSpec {
    pub theta: f64,
    pub kind: BaseKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub n: u64,
    pub replicates: u32,
    pub seed: u64,
    #[serde(default = "defaults::oracle_factor")]
    pub oracle_factor: u64,
    #[serde(default)]
    pub probes: Vec<String>,
    /// Explicit checkpoint list; geometric spacing when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<Vec<u64>>,
    #[serde(default = "defaults::checkpoint_start")]
    pub checkpoint_start: u64,
    #[serde(default = "defaults::checkpoint_ratio")]
    pub checkpoint_ratio: f64,
    #[serde(default = "defaults::alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub x_grid: Vec<f64>,
    /// Worker threads; 0 picks one per core.
    #[serde(default)]
    pub threads: usize,
    #[serde(default)]
    pub index: IndexChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum IndexChoice {
    #[default]
    Fenwick,
    LinearScan,
}

impl From<IndexChoice> for IndexKind {
    fn from(c: IndexChoice) -> Self {
        match c {
            IndexChoice::Fenwick => IndexKind::Fenwick,
            IndexChoice::LinearScan => IndexKind::LinearScan,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// `|median (1/n)ΣW − w̄|`
    pub mean_weight_tol: f64,
    /// median `P_n(D^c)`
    pub dominant_complement_max: f64,
    pub neighborhood_delta: f64,
    /// median `P_n(D_δ^c)`
    pub neighborhood_complement_max: f64,
    /// median `TV(P_n, P̂_n)`
    pub tv_max: f64,
    /// Share of replicates whose TV falls between the reference checkpoint and `n`.
    pub tv_decrease_min_fraction: f64,
    /// Reference checkpoint for the TV decrease; the largest checkpoint at most `n/10` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv_decrease_from: Option<u64>,
    /// Relative tolerance of mean `L_n/log n` around `θ/w̄`; no check when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinct_ratio_rel_tol: Option<f64>,
    /// `|median slope + γ|`
    pub slope_tol: f64,
    /// `|mean P_n(D^c)/P̂_n(D^c) − w̄^c/w̄|`
    pub ratio_tol: f64,
    pub ks_d_max: f64,
    pub ks_c_max: f64,
    pub ks_sum_max: f64,
    pub coverage_slack: f64,
    /// Replicates with `û < max(1e-7, floor·v̂)` leave the `C_n` sample.
    pub clt_u_rel_floor: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            mean_weight_tol: 0.03,
            dominant_complement_max: 0.02,
            neighborhood_delta: 0.1,
            neighborhood_complement_max: 0.05,
            tv_max: 0.03,
            tv_decrease_min_fraction: 0.9,
            tv_decrease_from: None,
            distinct_ratio_rel_tol: None,
            slope_tol: 0.12,
            ratio_tol: 0.15,
            ks_d_max: 0.06,
            ks_c_max: 0.08,
            ks_sum_max: 0.08,
            coverage_slack: 0.02,
            clt_u_rel_floor: 0.01,
        }
    }
}

mod defaults {
    pub fn oracle_factor() -> u64 {
        50
    }
    pub fn checkpoint_start() -> u64 {
        1000
    }
    pub fn checkpoint_ratio() -> f64 {
        10f64.sqrt()
    }
    pub fn alpha() -> f64 {
        0.05
    }
}

/// One validation failure, located by table and key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfigIssue {
    pub section: &'static str,
    pub key: Option<&'static str>,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.key {
            Some(k) => write!(f, "[{}] {}: {}", self.section, k, self.message),
            None => write!(f, "[{}]: {}", self.section, self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<ConfigIssue>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

/// A validated, ready-to-run configuration.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub model: WeightModel,
    pub base: Arc<BaseMeasure>,
    pub theta: f64,
    pub n: u64,
    pub replicates: u32,
    pub seed: u64,
    pub oracle_factor: u64,
    pub probes: Vec<SetExpr>,
    pub checkpoints: Vec<u64>,
    pub alpha: f64,
    pub x_grid: Vec<f64>,
    pub threads: usize,
    pub index: IndexKind,
    pub thresholds: Thresholds,
}

struct Issues(Vec<ConfigIssue>);

impl Issues {
    fn push(&mut self, section: &'static str, key: Option<&'static str>, message: impl Into<String>) {
        self.0.push(ConfigIssue {
            section,
            key,
            message: message.into(),
        });
    }

    fn need<T: Copy>(&mut self, value: Option<T>, key: &'static str, kind: &str) -> T
    where
        T: Default,
    {
        match value {
            Some(v) => v,
            None => {
                self.push("model", Some(key), format!("required for kind = \"{kind}\""));
                T::default()
            }
        }
    }
}

impl ModelSpec {
    pub fn mean_function(&self) -> std::result::Result<MeanFunction, Vec<ConfigIssue>> {
        let mut is = Issues(Vec::new());
        let kind = serde_kind(&self.kind);
        let mean = match self.kind {
            ModelKind::Constant => MeanFunction::Constant {
                w_bar: is.need(self.w_bar, "w_bar", kind),
            },
            ModelKind::KColor => match &self.means {
                Some(m) => MeanFunction::KColor { means: m.clone() },
                None => {
                    is.push("model", Some("means"), "required for kind = \"k-color\"");
                    MeanFunction::KColor { means: vec![] }
                }
            },
            ModelKind::Monotone => MeanFunction::Monotone {
                w1: is.need(self.w1, "w1", kind),
                w2: is.need(self.w2, "w2", kind),
            },
            ModelKind::Unimodal => MeanFunction::Unimodal {
                x0: is.need(self.x0, "x0", kind),
                peak: is.need(self.peak, "peak", kind),
                floor: is.need(self.floor, "floor", kind),
            },
            ModelKind::StepSpecies => MeanFunction::StepSpecies {
                w1: is.need(self.w1, "w1", kind),
                w2: is.need(self.w2, "w2", kind),
                p: is.need(self.p, "p", kind),
            },
        };
        if is.0.is_empty() {
            Ok(mean)
        } else {
            Err(is.0)
        }
    }

    pub fn noise_spec(&self) -> std::result::Result<NoiseSpec, ConfigIssue> {
        match (self.noise, self.rho) {
            (NoiseKind::Deterministic, None) => Ok(NoiseSpec::Deterministic),
            (NoiseKind::BernoulliScaled, None) => Ok(NoiseSpec::BernoulliScaled),
            (NoiseKind::BoundedMultiplicative, Some(rho)) => Ok(NoiseSpec::BoundedMultiplicative { rho }),
            (NoiseKind::BoundedMultiplicative, None) => Err(ConfigIssue {
                section: "model",
                key: Some("rho"),
                message: "required for noise = \"bounded-multiplicative\"".into(),
            }),
            (_, Some(_)) => Err(ConfigIssue {
                section: "model",
                key: Some("rho"),
                message: "only used with noise = \"bounded-multiplicative\"".into(),
            }),
        }
    }

    /// Inverse of [`ModelSpec::mean_function`] plus noise and bound.
    pub fn from_model(model: &WeightModel) -> Self {
        let mut spec = ModelSpec {
            kind: ModelKind::Constant,
            w_bar: None,
            means: None,
            w1: None,
            w2: None,
            p: None,
            x0: None,
            peak: None,
            floor: None,
            noise: NoiseKind::Deterministic,
            rho: None,
            beta: model.beta(),
        };
        match model.mean_function().clone() {
            MeanFunction::Constant { w_bar } => spec.w_bar = Some(w_bar),
            MeanFunction::KColor { means } => {
                spec.kind = ModelKind::KColor;
                spec.means = Some(means);
            }
            MeanFunction::Monotone { w1, w2 } => {
                spec.kind = ModelKind::Monotone;
                spec.w1 = Some(w1);
                spec.w2 = Some(w2);
            }
            MeanFunction::Unimodal { x0, peak, floor } => {
                spec.kind = ModelKind::Unimodal;
                spec.x0 = Some(x0);
                spec.peak = Some(peak);
                spec.floor = Some(floor);
            }
            MeanFunction::StepSpecies { w1, w2, p } => {
                spec.kind = ModelKind::StepSpecies;
                spec.w1 = Some(w1);
                spec.w2 = Some(w2);
                spec.p = Some(p);
            }
        }
        match model.noise() {
            NoiseSpec::Deterministic => {}
            NoiseSpec::BernoulliScaled => spec.noise = NoiseKind::BernoulliScaled,
            NoiseSpec::BoundedMultiplicative { rho } => {
                spec.noise = NoiseKind::BoundedMultiplicative;
                spec.rho = Some(rho);
            }
        }
        spec
    }
}

fn serde_kind(kind: &ModelKind) -> &'static str {
    match kind {
        ModelKind::Constant => "constant",
        ModelKind::KColor => "k-color",
        ModelKind::Monotone => "monotone",
        ModelKind::Unimodal => "unimodal",
        ModelKind::StepSpecies => "step-species",
    }
}

impl BaseSpec {
    pub fn measure(&self) -> std::result::Result<BaseMeasure, ConfigIssue> {
        let issue = |key: &'static str, message: String| ConfigIssue {
            section: "base",
            key: Some(key),
            message,
        };
        let continuous = || -> std::result::Result<ContinuousLaw, ConfigIssue> {
            match (self.a, self.lo, self.hi) {
                (Some(a), None, None) => Ok(ContinuousLaw::Power { a }),
                (None, lo, hi) => Ok(ContinuousLaw::Uniform {
                    lo: lo.unwrap_or(0.0),
                    hi: hi.unwrap_or(1.0),
                }),
                _ => Err(issue("a", "give either a (power law) or lo/hi (uniform), not both".into())),
            }
        };
        let probs = || match &self.probs {
            Some(p) => DiscreteLaw::new(p.clone()).map_err(|e| issue("probs", e.to_string())),
            None => Err(issue("probs", format!("required for kind = \"{}\"", base_kind(self.kind)))),
        };
        let unused = |key: &'static str, present: bool| {
            if present {
                Err(issue(key, format!("not used by kind = \"{}\"", base_kind(self.kind))))
            } else {
                Ok(())
            }
        };
        let built = match self.kind {
            BaseKind::Uniform => {
                unused("a", self.a.is_some())?;
                unused("probs", self.probs.is_some())?;
                unused("weight", self.weight.is_some())?;
                BaseMeasure::continuous(continuous()?)
            }
            BaseKind::Power => {
                unused("probs", self.probs.is_some())?;
                unused("weight", self.weight.is_some())?;
                unused("lo", self.lo.is_some() || self.hi.is_some())?;
                match self.a {
                    Some(a) => BaseMeasure::continuous(ContinuousLaw::Power { a }),
                    None => return Err(issue("a", "required for kind = \"power\"".into())),
                }
            }
            BaseKind::Discrete => {
                unused("a", self.a.is_some())?;
                unused("weight", self.weight.is_some())?;
                unused("lo", self.lo.is_some() || self.hi.is_some())?;
                Ok(BaseMeasure::Discrete(probs()?))
            }
            BaseKind::Mixture => match self.weight {
                Some(w) => BaseMeasure::mixture(w, probs()?, continuous()?),
                None => return Err(issue("weight", "required for kind = \"mixture\"".into())),
            },
        };
        built.map_err(|e| ConfigIssue {
            section: "base",
            key: None,
            message: e.to_string(),
        })
    }
}

fn base_kind(kind: BaseKind) -> &'static str {
    match kind {
        BaseKind::Uniform => "uniform",
        BaseKind::Power => "power",
        BaseKind::Discrete => "discrete",
        BaseKind::Mixture => "mixture",
    }
}

impl ExperimentConfig {
    /// Checks every table and collects all problems before any simulation.
    pub fn build(&self) -> std::result::Result<Experiment, ConfigErrors> {
        let mut is = Issues(Vec::new());

        let from_preset = match &self.preset {
            Some(name) => match preset(name) {
                Ok(p) => Some(p),
                Err(e) => {
                    is.push("preset", None, e.to_string());
                    None
                }
            },
            None => None,
        };

        let model = match (&self.model, &from_preset) {
            (Some(spec), _) => {
                let mean = spec.mean_function().map_err(|v| is.0.extend(v)).ok();
                let noise = spec.noise_spec().map_err(|v| is.0.push(v)).ok();
                match (mean, noise) {
                    (Some(m), Some(nz)) => match WeightModel::new(m, nz, spec.beta) {
                        Ok(model) => Some(model),
                        Err(e) => {
                            let key = if e.to_string().contains("0 <= W <= beta") { "beta" } else { "kind" };
                            is.push("model", Some(key), e.to_string());
                            None
                        }
                    },
                    _ => None,
                }
            }
            (None, Some(p)) => Some(p.model.clone()),
            (None, None) => {
                if self.preset.is_none() {
                    is.push("model", None, "missing [model] table (or a top-level preset)");
                }
                None
            }
        };

        let base = match (&self.base, &from_preset) {
            (Some(spec), _) => {
                if !(spec.theta > 0.0 && spec.theta.is_finite()) {
                    is.push("base", Some("theta"), format!("prior mass {} must be positive", spec.theta));
                }
                spec.measure().map_err(|e| is.0.push(e)).ok().map(|m| (spec.theta, m))
            }
            (None, Some(p)) => Some((p.theta, p.base.clone())),
            (None, None) => {
                if self.preset.is_none() {
                    is.push("base", None, "missing [base] table (or a top-level preset)");
                }
                None
            }
        };

        if let (Some(m), Some((_, b))) = (&model, &base) {
            let report = m.validate(b);
            if !report.domain_compatible {
                is.push("base", Some("kind"), format!("base measure does not live on the color domain of {m}"));
            }
            if !report.w_bar_in_support {
                is.push(
                    "base",
                    None,
                    format!("base measure puts no mass near the dominant set {} of {m}", m.dominant()),
                );
            }
        }

        let r = &self.run;
        if r.n < 10 {
            is.push("run", Some("n"), format!("horizon {} must be at least 10", r.n));
        }
        if r.replicates < 1 {
            is.push("run", Some("replicates"), "at least one replicate is required");
        }
        if r.seed > i64::MAX as u64 {
            is.push("run", Some("seed"), "seed must fit in a signed 64-bit integer");
        }
        if r.oracle_factor < 2 {
            is.push("run", Some("oracle_factor"), format!("oracle factor {} must be at least 2", r.oracle_factor));
        } else if r.n.checked_mul(r.oracle_factor).is_none() {
            is.push("run", Some("oracle_factor"), "oracle horizon n * oracle_factor overflows");
        }
        if !(r.alpha > 0.0 && r.alpha < 1.0) {
            is.push("run", Some("alpha"), format!("alpha = {} must lie in (0,1)", r.alpha));
        }
        if let Some(x) = r.x_grid.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            is.push("run", Some("x_grid"), format!("grid point {x} outside [0,1]"));
        }
        let mut probes = Vec::new();
        for text in &r.probes {
            match text.parse::<SetExpr>() {
                Ok(set) => probes.push(set),
                Err(e) => is.push("run", Some("probes"), e.to_string()),
            }
        }
        let checkpoints = match &r.checkpoints {
            Some(cps) => {
                if cps.windows(2).any(|w| w[0] >= w[1]) || cps.first() == Some(&0) {
                    is.push("run", Some("checkpoints"), "checkpoints must be positive and strictly increasing");
                }
                if cps.last().is_some_and(|&c| c > r.n) {
                    is.push("run", Some("checkpoints"), format!("checkpoints must not exceed n = {}", r.n));
                }
                let mut cps = cps.clone();
                if cps.last() != Some(&r.n) {
                    cps.push(r.n);
                }
                cps
            }
            None => {
                if !(r.checkpoint_ratio > 1.0) {
                    is.push("run", Some("checkpoint_ratio"), "checkpoint ratio must exceed 1");
                }
                geometric_checkpoints(r.checkpoint_start, r.checkpoint_ratio, r.n)
            }
        };

        let t = &self.thresholds;
        for (key, v) in [
            ("mean_weight_tol", t.mean_weight_tol),
            ("dominant_complement_max", t.dominant_complement_max),
            ("neighborhood_delta", t.neighborhood_delta),
            ("neighborhood_complement_max", t.neighborhood_complement_max),
            ("tv_max", t.tv_max),
            ("slope_tol", t.slope_tol),
            ("ratio_tol", t.ratio_tol),
            ("ks_d_max", t.ks_d_max),
            ("ks_c_max", t.ks_c_max),
            ("ks_sum_max", t.ks_sum_max),
            ("coverage_slack", t.coverage_slack),
            ("clt_u_rel_floor", t.clt_u_rel_floor),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                is.push("thresholds", Some(key), format!("{v} must be a nonnegative number"));
            }
        }
        if !(0.0..=1.0).contains(&t.tv_decrease_min_fraction) {
            is.push("thresholds", Some("tv_decrease_min_fraction"), "must lie in [0,1]");
        }
        if t.neighborhood_delta <= 0.0 {
            is.push("thresholds", Some("neighborhood_delta"), "must be positive");
        }
        if let Some(from) = t.tv_decrease_from {
            if !checkpoints.contains(&from) || from == r.n {
                is.push(
                    "thresholds",
                    Some("tv_decrease_from"),
                    format!("{from} is not a checkpoint before n = {}", r.n),
                );
            }
        }

        match (model, base) {
            (Some(model), Some((theta, base))) if is.0.is_empty() => Ok(Experiment {
                model,
                base: Arc::new(base),
                theta,
                n: r.n,
                replicates: r.replicates,
                seed: r.seed,
                oracle_factor: r.oracle_factor,
                probes,
                checkpoints,
                alpha: r.alpha,
                x_grid: r.x_grid.clone(),
                threads: r.threads,
                index: r.index.into(),
                thresholds: t.clone(),
            }),
            _ => Err(ConfigErrors(is.0)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(n: u64) -> RunSpec {
        RunSpec {
            n,
            replicates: 2,
            seed: 1,
            oracle_factor: 50,
            probes: vec!["(0.5,0.75]".into()],
            checkpoints: None,
            checkpoint_start: 1000,
            checkpoint_ratio: 10f64.sqrt(),
            alpha: 0.05,
            x_grid: vec![],
            threads: 1,
            index: IndexChoice::Fenwick,
        }
    }

    fn species(beta: f64) -> ModelSpec {
        ModelSpec::from_model(&WeightModel::step_species(1.0, 2.0, 0.5, NoiseSpec::Deterministic, 2.0).unwrap())
            .with_beta(beta)
    }

    impl ModelSpec {
        fn with_beta(mut self, beta: f64) -> Self {
            self.beta = beta;
            self
        }
    }

    fn uniform_base() -> BaseSpec {
        BaseSpec {
            theta: 1.0,
            kind: BaseKind::Uniform,
            lo: None,
            hi: None,
            a: None,
            probs: None,
            weight: None,
        }
    }

    #[test]
    fn explicit_config_builds() {
        let cfg = ExperimentConfig {
            preset: None,
            model: Some(species(2.0)),
            base: Some(uniform_base()),
            run: run(100_000),
            thresholds: Thresholds::default(),
        };
        let e = cfg.build().unwrap();
        assert_eq!(e.model.gamma(), 0.5);
        assert_eq!(e.checkpoints, vec![1000, 3163, 10000, 31623, 100000]);
        assert_eq!(e.probes.len(), 1);
    }

    #[test]
    fn preset_supplies_model_and_base() {
        let cfg = ExperimentConfig {
            preset: Some("species-clt".into()),
            model: None,
            base: None,
            run: run(5000),
            thresholds: Thresholds::default(),
        };
        let e = cfg.build().unwrap();
        assert!(e.model.clt_hypothesis());
    }

    #[test]
    fn all_problems_are_listed() {
        let mut r = run(5);
        r.alpha = 1.0;
        r.probes = vec!["(0.5,".into()];
        let cfg = ExperimentConfig {
            preset: None,
            model: Some(species(1.5)),
            base: Some(BaseSpec { theta: 0.0, ..uniform_base() }),
            run: r,
            thresholds: Thresholds::default(),
        };
        let errs = cfg.build().unwrap_err().0;
        let keys: Vec<_> = errs.iter().map(|e| (e.section, e.key)).collect();
        for want in [
            ("model", Some("beta")),
            ("base", Some("theta")),
            ("run", Some("n")),
            ("run", Some("alpha")),
            ("run", Some("probes")),
        ] {
            assert!(keys.contains(&want), "{want:?} missing from {keys:?}");
        }
        let beta = errs.iter().find(|e| e.key == Some("beta")).unwrap();
        assert!(beta.message.contains("0 <= W <= beta"));
    }

    #[test]
    fn missing_model_parameters() {
        let mut m = species(2.0);
        m.p = None;
        m.rho = Some(0.5);
        let cfg = ExperimentConfig {
            preset: None,
            model: Some(m),
            base: Some(uniform_base()),
            run: run(100),
            thresholds: Thresholds::default(),
        };
        let errs = cfg.build().unwrap_err().0;
        assert!(errs.iter().any(|e| e.key == Some("p")));
        assert!(errs.iter().any(|e| e.key == Some("rho")));
    }

    #[test]
    fn support_mismatch_is_reported() {
        let cfg = ExperimentConfig {
            preset: None,
            model: Some(ModelSpec::from_model(
                &WeightModel::k_color_rru(vec![2.0, 2.0, 1.0], NoiseSpec::Deterministic, 3.0).unwrap(),
            )),
            base: Some(BaseSpec {
                kind: BaseKind::Discrete,
                probs: Some(vec![0.0, 0.0, 1.0]),
                ..uniform_base()
            }),
            run: run(100),
            thresholds: Thresholds::default(),
        };
        let errs = cfg.build().unwrap_err();
        assert!(errs.to_string().contains("dominant set"), "{errs}");
    }

    #[test]
    fn model_spec_round_trips() {
        for p in crate::presets::catalog() {
            let spec = ModelSpec::from_model(&p.model);
            let back = WeightModel::new(spec.mean_function().unwrap(), spec.noise_spec().unwrap(), spec.beta).unwrap();
            assert_eq!(back, p.model);
        }
    }
}
