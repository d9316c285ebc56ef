//! Expected-weight functions, reinforcement noise, and the derived dominance
//! quantities (`w̄`, `w̄ᶜ`, dominant set, decay exponent `γ`).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::base::BaseMeasure;
use crate::color::{Color, Interval, LabelSet, SetExpr};
use crate::error::{invalid, Error, Result};

/// Resolution of the validation grid on `[0,1]`.
pub const VALIDATION_GRID: usize = 10_000;
/// Radii at which the dominance-gap assumption is checked.
pub const DELTA_GRID: [f64; 4] = [0.2, 0.1, 0.05, 0.01];

/// The expected-weight function `w(x) = E[W | X = x]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeanFunction {
    /// `w ≡ w_bar` on every color.
    Constant { w_bar: f64 },
    /// `w(j) = means[j]` on labels `0..k`.
    KColor { means: Vec<f64> },
    /// `w(x) = w1 + (w2 − w1)·x` on `[0,1]`.
    Monotone { w1: f64, w2: f64 },
    /// Tent peaking at `x0`, falling linearly to `floor` at the farther endpoint.
    Unimodal { x0: f64, peak: f64, floor: f64 },
    /// `w = w1` on `[0,p)`, `w2` on `[p,1]`.
    StepSpecies { w1: f64, w2: f64, p: f64 },
}

/// The reinforcement mechanism `W = h(x, U)` with `U` uniform on `[0,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "noise", rename_all = "kebab-case")]
pub enum NoiseSpec {
    /// `W = w(x)`.
    #[default]
    Deterministic,
    /// `W = w(x)·(1 + rho·(2U − 1))`.
    BoundedMultiplicative { rho: f64 },
    /// `W = β·1{U < w(x)/β}`.
    BernoulliScaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorDomain {
    Any,
    Labels(usize),
    UnitInterval,
}

impl ColorDomain {
    pub fn set(self) -> SetExpr {
        match self {
            ColorDomain::Any => SetExpr::full(),
            ColorDomain::Labels(k) => SetExpr::labels(0..k as u32),
            ColorDomain::UnitInterval => SetExpr::unit_interval(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightModel {
    mean: MeanFunction,
    noise: NoiseSpec,
    beta: f64,
    w_bar: f64,
    w_bar_c: f64,
    dominant: SetExpr,
}

fn bound_error(what: String, beta: f64) -> Error {
    invalid(format!(
        "{what} exceeds the weight bound beta = {beta} (bounded-reinforcement assumption 0 <= W <= beta)"
    ))
}

impl WeightModel {
    pub fn new(mean: MeanFunction, noise: NoiseSpec, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(invalid(format!("weight bound beta = {beta} must be positive and finite")));
        }
        let (w_bar, w_bar_c, dominant) = match &mean {
            MeanFunction::Constant { w_bar } => {
                if !(*w_bar > 0.0) {
                    return Err(invalid(format!("constant weight {w_bar} must be positive")));
                }
                (*w_bar, 0.0, SetExpr::full())
            }
            MeanFunction::KColor { means } => {
                if means.is_empty() {
                    return Err(invalid("k-color model needs at least one mean"));
                }
                if let Some(m) = means.iter().find(|m| !(**m >= 0.0 && m.is_finite())) {
                    return Err(invalid(format!("mean weight {m} must be finite and nonnegative")));
                }
                let top = means.iter().cloned().fold(f64::MIN, f64::max);
                let dom: Vec<u32> = (0..means.len() as u32).filter(|&j| means[j as usize] == top).collect();
                let rest = means.iter().cloned().filter(|m| *m < top).fold(0.0, f64::max);
                (top, rest, SetExpr::labels(dom))
            }
            MeanFunction::Monotone { w1, w2 } => {
                if !(0.0 <= *w1 && w1 < w2) {
                    return Err(invalid(format!(
                        "monotone model needs 0 <= w1 < w2 (strictly increasing), got w1 = {w1}, w2 = {w2}"
                    )));
                }
                (*w2, *w2, SetExpr::points(&[1.0])?)
            }
            MeanFunction::Unimodal { x0, peak, floor } => {
                if !(0.0 < *x0 && *x0 < 1.0) {
                    return Err(invalid(format!("unimodal peak location {x0} must lie in (0,1)")));
                }
                if !(0.0 <= *floor && floor < peak) {
                    return Err(invalid(format!("unimodal model needs 0 <= floor < peak, got floor = {floor}, peak = {peak}")));
                }
                (*peak, *peak, SetExpr::points(&[*x0])?)
            }
            MeanFunction::StepSpecies { w1, w2, p } => {
                if !(0.0 < *w1 && w1 < w2) {
                    return Err(invalid(format!("step model needs 0 < w1 < w2, got w1 = {w1}, w2 = {w2}")));
                }
                if !(0.0 < *p && *p < 1.0) {
                    return Err(invalid(format!("step location p = {p} must lie in (0,1)")));
                }
                (*w2, *w1, SetExpr::new(vec![Interval::closed(*p, 1.0)?], LabelSet::none()))
            }
        };

        match noise {
            NoiseSpec::Deterministic | NoiseSpec::BernoulliScaled => {
                if w_bar > beta {
                    return Err(bound_error(format!("maximal mean weight {w_bar}"), beta));
                }
            }
            NoiseSpec::BoundedMultiplicative { rho } => {
                if !(0.0..1.0).contains(&rho) {
                    return Err(invalid(format!("multiplicative noise rho = {rho} must lie in [0,1)")));
                }
                if (1.0 + rho) * w_bar > beta {
                    return Err(bound_error(format!("largest possible weight (1 + {rho})·{w_bar}"), beta));
                }
            }
        }

        Ok(WeightModel {
            mean,
            noise,
            beta,
            w_bar,
            w_bar_c,
            dominant,
        })
    }

    pub fn constant(w_bar: f64, noise: NoiseSpec, beta: f64) -> Result<Self> {
        Self::new(MeanFunction::Constant { w_bar }, noise, beta)
    }

    pub fn k_color_rru(means: Vec<f64>, noise: NoiseSpec, beta: f64) -> Result<Self> {
        Self::new(MeanFunction::KColor { means }, noise, beta)
    }

    pub fn monotone(w1: f64, w2: f64, noise: NoiseSpec, beta: f64) -> Result<Self> {
        Self::new(MeanFunction::Monotone { w1, w2 }, noise, beta)
    }

    pub fn unimodal(x0: f64, peak: f64, floor: f64, noise: NoiseSpec, beta: f64) -> Result<Self> {
        Self::new(MeanFunction::Unimodal { x0, peak, floor }, noise, beta)
    }

    pub fn step_species(w1: f64, w2: f64, p: f64, noise: NoiseSpec, beta: f64) -> Result<Self> {
        Self::new(MeanFunction::StepSpecies { w1, w2, p }, noise, beta)
    }

    pub fn mean_function(&self) -> &MeanFunction {
        &self.mean
    }

    pub fn noise(&self) -> NoiseSpec {
        self.noise
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `w̄ = sup_x w(x)`.
    pub fn w_bar(&self) -> f64 {
        self.w_bar
    }

    /// Top of the expected weights off the dominant set; `0` when that set is empty.
    pub fn w_bar_c(&self) -> f64 {
        self.w_bar_c
    }

    pub fn dominant(&self) -> &SetExpr {
        &self.dominant
    }

    pub fn dominant_neighborhood(&self, delta: f64) -> SetExpr {
        self.dominant.neighborhood(delta)
    }

    /// Polynomial decay exponent `1 − w̄ᶜ/w̄` of the non-dominant mass.
    pub fn gamma(&self) -> f64 {
        1.0 - self.w_bar_c / self.w_bar
    }

    /// Whether `w̄ > 2·w̄ᶜ`, the hypothesis of the central limit results.
    pub fn clt_hypothesis(&self) -> bool {
        self.w_bar > 2.0 * self.w_bar_c
    }

    pub fn domain(&self) -> ColorDomain {
        match &self.mean {
            MeanFunction::Constant { .. } => ColorDomain::Any,
            MeanFunction::KColor { means } => ColorDomain::Labels(means.len()),
            _ => ColorDomain::UnitInterval,
        }
    }

    pub fn is_continuous(&self) -> bool {
        !matches!(
            self.mean,
            MeanFunction::KColor { .. } | MeanFunction::StepSpecies { .. }
        )
    }

    /// `w(color)`; colors outside the model's domain have mean weight 0.
    pub fn mean(&self, color: &Color) -> f64 {
        match (&self.mean, *color) {
            (MeanFunction::Constant { w_bar }, _) => *w_bar,
            (MeanFunction::KColor { means }, Color::Label(l)) => means.get(l as usize).copied().unwrap_or(0.0),
            (MeanFunction::Monotone { w1, w2 }, Color::Point(x)) => w1 + (w2 - w1) * x,
            (MeanFunction::Unimodal { x0, peak, floor }, Color::Point(x)) => {
                let half_width = x0.max(1.0 - x0);
                peak - (peak - floor) * (x - x0).abs() / half_width
            }
            (MeanFunction::StepSpecies { w1, w2, p }, Color::Point(x)) => {
                if x < *p {
                    *w1
                } else {
                    *w2
                }
            }
            _ => 0.0,
        }
    }

    /// `h(color, u)` for `u` uniform on `[0,1)`.
    pub fn weight(&self, color: &Color, u: f64) -> f64 {
        let w = self.mean(color);
        let raw = match self.noise {
            NoiseSpec::Deterministic => w,
            NoiseSpec::BoundedMultiplicative { rho } => w * (1.0 + rho * (2.0 * u - 1.0)),
            NoiseSpec::BernoulliScaled => {
                if u < w / self.beta {
                    self.beta
                } else {
                    0.0
                }
            }
        };
        raw.clamp(0.0, self.beta)
    }

    /// Checks the model against the dominance assumptions for base measure `base`.
    pub fn validate(&self, base: &BaseMeasure) -> ValidationReport {
        let mut notes = Vec::new();

        let domain_compatible = match self.domain() {
            ColorDomain::Any => true,
            ColorDomain::Labels(k) => !base.has_continuous_part() && base.num_labels() == k,
            ColorDomain::UnitInterval => base.num_labels() == 0 || base.atoms().is_empty(),
        };
        if !domain_compatible {
            notes.push(format!(
                "base measure colors do not match the model domain {:?}",
                self.domain()
            ));
        }

        let grid: Vec<Color> = if base.has_continuous_part() {
            (0..=VALIDATION_GRID)
                .map(|i| Color::Point(i as f64 / VALIDATION_GRID as f64))
                .collect()
        } else {
            Vec::new()
        };
        let labels: Vec<Color> = (0..base.num_labels() as u32).map(Color::Label).collect();
        let colors = || grid.iter().chain(labels.iter());

        let top_weight = match self.noise {
            NoiseSpec::BoundedMultiplicative { rho } => 1.0 + rho,
            _ => 1.0,
        };
        let bounded = colors().all(|c| {
            let w = self.mean(c);
            w >= 0.0 && w * top_weight <= self.beta
        }) && self.w_bar * top_weight <= self.beta;
        if !bounded {
            notes.push("weights can exceed beta".into());
        }

        let w_bar_in_support = base.measure(&self.dominant) > 0.0
            || (self.is_continuous()
                && DELTA_GRID
                    .iter()
                    .all(|&d| base.measure(&self.dominant_neighborhood(d)) > 0.0));
        if !w_bar_in_support {
            notes.push("base measure puts no mass near the dominant colors".into());
        }

        let dominance_gap = DELTA_GRID.iter().all(|&d| {
            let nbhd = self.dominant_neighborhood(d);
            let sup = colors()
                .filter(|c| !nbhd.contains(c))
                .map(|c| self.mean(c))
                .fold(f64::NEG_INFINITY, f64::max);
            sup < self.w_bar
        });
        if !dominance_gap {
            notes.push("expected weight is not separated from its maximum away from the dominant set".into());
        }

        ValidationReport {
            domain_compatible,
            bounded,
            w_bar_in_support,
            dominance_gap,
            gamma: self.gamma(),
            clt_hypothesis: self.clt_hypothesis(),
            notes,
        }
    }
}

impl fmt::Display for WeightModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.mean {
            MeanFunction::Constant { w_bar } => write!(f, "constant(w={w_bar})")?,
            MeanFunction::KColor { means } => write!(f, "k-color(means={means:?})")?,
            MeanFunction::Monotone { w1, w2 } => write!(f, "monotone(w1={w1}, w2={w2})")?,
            MeanFunction::Unimodal { x0, peak, floor } => {
                write!(f, "unimodal(x0={x0}, peak={peak}, floor={floor})")?
            }
            MeanFunction::StepSpecies { w1, w2, p } => write!(f, "step-species(w1={w1}, w2={w2}, p={p})")?,
        }
        match self.noise {
            NoiseSpec::Deterministic => write!(f, " deterministic")?,
            NoiseSpec::BoundedMultiplicative { rho } => write!(f, " multiplicative(rho={rho})")?,
            NoiseSpec::BernoulliScaled => write!(f, " bernoulli")?,
        }
        write!(f, " beta={}", self.beta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub domain_compatible: bool,
    /// `0 <= W <= β` on every checked color.
    pub bounded: bool,
    /// `w̄` lies in the support of the image of `ν` under `w`.
    pub w_bar_in_support: bool,
    /// `w̄ > sup` of `w` off every checked `δ`-neighborhood of the dominant set.
    pub dominance_gap: bool,
    pub gamma: f64,
    pub clt_hypothesis: bool,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_dps(&self) -> bool {
        self.domain_compatible && self.bounded && self.w_bar_in_support && self.dominance_gap
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{CounterRng, StreamRole};
    use rand::Rng;

    const DET: NoiseSpec = NoiseSpec::Deterministic;

    #[test]
    fn k_color_dominant_labels() {
        let m = WeightModel::k_color_rru(vec![2.0, 2.0, 1.0], DET, 3.0).unwrap();
        assert_eq!(m.dominant(), &SetExpr::labels([0, 1]));
        assert_eq!(m.w_bar(), 2.0);
        assert_eq!(m.w_bar_c(), 1.0);

        let m = WeightModel::k_color_rru(vec![1.0, 1.0, 1.0], DET, 3.0).unwrap();
        assert_eq!(m.dominant(), &SetExpr::labels([0, 1, 2]));
        assert_eq!(m.w_bar_c(), 0.0);

        assert!(WeightModel::k_color_rru(vec![4.0, 1.0], DET, 3.0).is_err());
        assert!(WeightModel::k_color_rru(vec![], DET, 3.0).is_err());
    }

    #[test]
    fn monotone_dominant_is_right_endpoint() {
        let m = WeightModel::monotone(1.0, 2.0, DET, 2.0).unwrap();
        assert_eq!(m.w_bar(), 2.0);
        assert_eq!(m.dominant(), &SetExpr::points(&[1.0]).unwrap());
        assert_eq!(m.gamma(), 0.0);
        let nb = m.dominant_neighborhood(0.1);
        assert!(nb.contains(&Color::Point(0.95)) && nb.contains(&Color::Point(1.0)));
        assert!(!nb.contains(&Color::Point(0.9)));
        assert!(WeightModel::monotone(2.0, 2.0, DET, 2.0).is_err());
    }

    #[test]
    fn step_species_gamma() {
        let m = WeightModel::step_species(1.0, 2.0, 0.5, DET, 2.0).unwrap();
        assert_eq!(m.gamma(), 0.5);
        assert!(!m.clt_hypothesis());
        assert!(m.dominant().contains(&Color::Point(0.5)));
        assert!(!m.dominant().contains(&Color::Point(0.4999999)));

        let m = WeightModel::step_species(1.0, 2.5, 0.5, DET, 2.5).unwrap();
        assert!((m.gamma() - 0.6).abs() < 1e-15);
        assert!(m.clt_hypothesis());

        assert!(WeightModel::step_species(1.0, 1.0, 0.5, DET, 2.0).is_err());
        assert!(WeightModel::step_species(1.0, 2.0, 1.0, DET, 2.0).is_err());
    }

    #[test]
    fn unimodal_dominant_point() {
        let m = WeightModel::unimodal(0.6, 2.0, 1.0, DET, 2.0).unwrap();
        assert_eq!(m.dominant(), &SetExpr::points(&[0.6]).unwrap());
        assert_eq!(m.mean(&Color::Point(0.6)), 2.0);
        assert!((m.mean(&Color::Point(0.0)) - 1.0).abs() < 1e-15);
        let nb = m.dominant_neighborhood(0.05);
        assert!(nb.contains(&Color::Point(0.56)) && !nb.contains(&Color::Point(0.66)));
        assert!(WeightModel::unimodal(0.6, 2.0, 2.0, DET, 2.0).is_err());
    }

    #[test]
    fn constant_model() {
        let m = WeightModel::constant(1.0, DET, 1.0).unwrap();
        assert_eq!(m.dominant(), &SetExpr::full());
        assert_eq!(m.w_bar_c(), 0.0);
        assert_eq!(m.weight(&Color::Point(0.2), 0.7), 1.0);
        assert!(WeightModel::constant(0.0, DET, 1.0).is_err());

        let b = WeightModel::constant(2.0, NoiseSpec::BernoulliScaled, 3.0).unwrap();
        assert_eq!(b.weight(&Color::Point(0.1), 0.5), 3.0);
        assert_eq!(b.weight(&Color::Point(0.1), 0.7), 0.0);
    }

    #[test]
    fn bound_violation_mentions_assumption() {
        let e = WeightModel::step_species(1.0, 2.5, 0.5, DET, 2.0).unwrap_err();
        assert!(e.to_string().contains("0 <= W <= beta"));
        let e = WeightModel::constant(2.0, NoiseSpec::BoundedMultiplicative { rho: 0.5 }, 2.5).unwrap_err();
        assert!(e.to_string().contains("beta"));
    }

    #[test]
    fn validation_reports() {
        let uni = BaseMeasure::uniform();
        let r = WeightModel::step_species(1.0, 2.0, 0.5, DET, 2.0).unwrap().validate(&uni);
        assert!(r.is_dps(), "{r:?}");
        assert_eq!(r.gamma, 0.5);
        assert!(!r.clt_hypothesis);

        let r = WeightModel::step_species(1.0, 2.5, 0.5, DET, 2.5).unwrap().validate(&uni);
        assert!(r.clt_hypothesis);

        let null_dominant = BaseMeasure::discrete(vec![0.0, 0.0, 1.0]).unwrap();
        let r = WeightModel::k_color_rru(vec![2.0, 2.0, 1.0], DET, 3.0)
            .unwrap()
            .validate(&null_dominant);
        assert!(!r.w_bar_in_support);
        assert!(!r.is_dps());

        for m in [
            WeightModel::monotone(1.0, 2.0, DET, 2.0).unwrap(),
            WeightModel::unimodal(0.6, 2.0, 1.0, DET, 2.0).unwrap(),
            WeightModel::constant(1.0, DET, 1.0).unwrap(),
        ] {
            assert!(m.validate(&uni).is_dps(), "{m}");
        }

        let r = WeightModel::monotone(1.0, 2.0, DET, 2.0)
            .unwrap()
            .validate(&BaseMeasure::discrete(vec![1.0]).unwrap());
        assert!(!r.domain_compatible);
    }

    fn all_models() -> Vec<WeightModel> {
        let mut out = Vec::new();
        for noise in [
            NoiseSpec::Deterministic,
            NoiseSpec::BoundedMultiplicative { rho: 0.5 },
            NoiseSpec::BernoulliScaled,
        ] {
            out.push(WeightModel::constant(2.0, noise, 3.0).unwrap());
            out.push(WeightModel::monotone(1.0, 2.0, noise, 3.0).unwrap());
            out.push(WeightModel::unimodal(0.6, 2.0, 1.0, noise, 3.0).unwrap());
            out.push(WeightModel::step_species(1.0, 2.0, 0.5, noise, 3.0).unwrap());
        }
        out
    }

    #[test]
    fn noise_has_the_prescribed_mean() {
        let n = 100_000;
        let mut rng = CounterRng::new(99, 0, StreamRole::Noise);
        for m in all_models() {
            for x in [0.0, 0.25, 0.5, 0.6, 1.0] {
                let c = Color::Point(x);
                let (mut s, mut s2) = (0.0, 0.0);
                for _ in 0..n {
                    let w = m.weight(&c, rng.random());
                    assert!((0.0..=m.beta()).contains(&w));
                    s += w;
                    s2 += w * w;
                }
                let mean = s / n as f64;
                let sd = (s2 / n as f64 - mean * mean).max(0.0).sqrt();
                let se = sd / (n as f64).sqrt();
                assert!(
                    (mean - m.mean(&c)).abs() <= 4.0 * se + 1e-9 * m.mean(&c),
                    "{m} at {x}: {mean} vs {}",
                    m.mean(&c)
                );
            }
        }
    }

    #[test]
    fn gamma_identity() {
        for m in all_models() {
            if m.w_bar_c() > 0.0 {
                assert_eq!(m.gamma(), 1.0 - m.w_bar_c() / m.w_bar());
            }
        }
    }

    #[test]
    fn neighborhood_matches_metric_definition() {
        for m in all_models() {
            for &d in &DELTA_GRID {
                let nb = m.dominant_neighborhood(d);
                for i in 0..=VALIDATION_GRID {
                    let c = Color::Point(i as f64 / VALIDATION_GRID as f64);
                    let dist = m.dominant().distance(&c);
                    if (dist - d).abs() < 1e-12 {
                        continue; // floating tie on the boundary
                    }
                    assert_eq!(nb.contains(&c), dist < d, "{m} delta={d} x={c}");
                }
            }
        }
    }
}
