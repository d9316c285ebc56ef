//! Statistics over urn states: total variation, distinct-color growth, decay
//! rates of the non-dominant mass, central limit statistics and their
//! plug-in variances, credible intervals, and Kolmogorov–Smirnov distances.

mod measure;
mod normal;

pub use measure::{total_variation, MeasureRepr};
pub use normal::{normal_cdf, normal_quantile, two_sided_z};

use serde::Serialize;

use crate::color::{Color, Interval, SetExpr};
use crate::error::{invalid, Error, Result};
use crate::urn::{ProbabilityKind, UrnState};
use crate::weights::WeightModel;

/// `L_n / log n`.
pub fn distinct_ratio(state: &UrnState) -> Result<f64> {
    if state.steps() < 2 {
        return Err(invalid("distinct-color ratio needs n >= 2"));
    }
    if !state.base().is_diffuse() {
        return Err(invalid("distinct-color growth is only defined for a diffuse base measure"));
    }
    Ok(state.distinct() as f64 / (state.steps() as f64).ln())
}

/// `n^γ · P(D^c)` under the predictive or empirical law.
pub fn rate_statistic(state: &UrnState, model: &WeightModel, kind: ProbabilityKind) -> Result<f64> {
    let gamma = model.gamma();
    if gamma <= 0.0 {
        return Err(Error::HypothesisUnmet(format!(
            "decay exponent is {gamma}; no polynomial rate for {model}"
        )));
    }
    let p = state.probability(&model.dominant().complement(), kind)?;
    Ok((state.steps() as f64).powf(gamma) * p)
}

/// Least-squares slope of `log value` against `log n`.
pub fn regression_exponent(series: &[(f64, f64)]) -> Result<f64> {
    if series.len() < 3 {
        return Err(invalid("log-log regression needs at least 3 points"));
    }
    if series.iter().any(|(n, v)| !(*v > 0.0) || !(*n > 0.0)) {
        return Err(invalid("log-log regression needs positive n and values"));
    }
    if series.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(invalid("regression abscissae must be strictly increasing"));
    }
    let pts: Vec<(f64, f64)> = series.iter().map(|(n, v)| (n.ln(), v.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// Plug-in estimates behind the limiting variances of the central limit
/// statistics of a set `A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceEstimate {
    /// `m_n = (1/n) Σ W_i`
    pub m_n: f64,
    /// `(1/n) Σ W_i² δ_{X_i}(A)`
    pub s_a: f64,
    /// `(1/n) Σ W_i² δ_{X_i}(A^c)`
    pub s_ac: f64,
    /// `P_n(A)`
    pub pred_prob: f64,
    /// `m_n^{-2} [(1 − P_n(A))² s_a + P_n(A)² s_ac]`
    pub v_hat: f64,
    /// `v_hat − P_n(A)(1 − P_n(A))`; may be slightly negative.
    pub u_hat: f64,
}

pub fn variance_estimators(state: &UrnState, set: &SetExpr) -> Result<VarianceEstimate> {
    if state.steps() == 0 {
        return Err(Error::EmptyHistory);
    }
    let n = state.steps() as f64;
    let (mut in_a, mut out_a) = (0.0, 0.0);
    for atom in state.atoms() {
        if set.contains(&atom.color) {
            in_a += atom.sum_w2;
        } else {
            out_a += atom.sum_w2;
        }
    }
    let m_n = state.sum_w() / n;
    let (s_a, s_ac) = (in_a / n, out_a / n);
    let p = state.predictive_probability(set);
    let v_hat = if m_n > 0.0 {
        ((1.0 - p).powi(2) * s_a + p * p * s_ac) / (m_n * m_n)
    } else {
        0.0
    };
    Ok(VarianceEstimate {
        m_n,
        s_a,
        s_ac,
        pred_prob: p,
        v_hat,
        u_hat: v_hat - p * (1.0 - p),
    })
}

/// `C_n(A) = √n (P̂_n(A) − P_n(A))` and `D_n(A) = √n (P_n(A) − P̃(A))` with
/// their plug-in variances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltSample {
    pub replicate: u32,
    pub probe: usize,
    pub n: u64,
    pub pred_prob: f64,
    pub emp_prob: f64,
    pub c_stat: f64,
    pub d_stat: f64,
    pub u_hat: f64,
    pub v_hat: f64,
    pub oracle_p: f64,
}

impl CltSample {
    /// Re-targets `D_n` at a different stand-in for `P̃(A)`.
    pub fn with_oracle(mut self, oracle_p: f64) -> Self {
        self.oracle_p = oracle_p;
        self.d_stat = (self.n as f64).sqrt() * (self.pred_prob - oracle_p);
        self
    }
}

pub fn clt_statistics(state: &UrnState, set: &SetExpr, oracle_p: f64) -> Result<CltSample> {
    if !(0.0..=1.0).contains(&oracle_p) {
        return Err(invalid(format!("oracle probability {oracle_p} outside [0,1]")));
    }
    let est = variance_estimators(state, set)?;
    let emp = state.empirical_probability(set)?;
    let root_n = (state.steps() as f64).sqrt();
    Ok(CltSample {
        replicate: 0,
        probe: 0,
        n: state.steps(),
        pred_prob: est.pred_prob,
        emp_prob: emp,
        c_stat: root_n * (emp - est.pred_prob),
        d_stat: root_n * (est.pred_prob - oracle_p),
        u_hat: est.u_hat,
        v_hat: est.v_hat,
        oracle_p,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CredibleInterval {
    pub lo: f64,
    pub hi: f64,
    /// `F_n(x)`
    pub center: f64,
    /// `V_{n,x}`
    pub v_hat: f64,
}

impl CredibleInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Zero-width intervals cover only an exactly equal value.
    pub fn covers(&self, value: f64) -> bool {
        if self.v_hat == 0.0 {
            value == self.center
        } else {
            self.lo <= value && value <= self.hi
        }
    }
}

/// Asymptotic marginal credible interval `F_n(x) ± z_α √(V_{n,x}/n)` for the
/// limiting distribution function at `x`, clamped to `[0,1]`.
pub fn credible_interval(state: &UrnState, x: f64, alpha: f64) -> Result<CredibleInterval> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid(format!("alpha = {alpha} must lie in (0,1)")));
    }
    let set = SetExpr::interval(Interval::closed(0.0, x)?);
    let est = variance_estimators(state, &set)?;
    let half = two_sided_z(alpha) * (est.v_hat.max(0.0) / state.steps() as f64).sqrt();
    Ok(CredibleInterval {
        lo: (est.pred_prob - half).max(0.0),
        hi: (est.pred_prob + half).min(1.0),
        center: est.pred_prob,
        v_hat: est.v_hat,
    })
}

/// Kolmogorov–Smirnov distance between the empirical CDF of `sample` and `cdf`.
pub fn ks_distance_to<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<f64> {
    if sample.is_empty() {
        return Err(invalid("KS distance of an empty sample"));
    }
    if sample.iter().any(|x| x.is_nan()) {
        return Err(invalid("KS sample contains NaN"));
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(d.clamp(0.0, 1.0))
}

/// KS distance to the standard normal.
pub fn ks_distance(sample: &[f64]) -> Result<f64> {
    ks_distance_to(sample, normal_cdf)
}

pub fn distance_to_dominant(color: &Color, model: &WeightModel) -> f64 {
    model.dominant().distance(color)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::BaseMeasure;
    use crate::rng::{CounterRng, ReplicateStreams, StreamRole};
    use crate::weights::NoiseSpec;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand_distr_free_normal as gauss;

    // Box–Muller, so the KS tests do not lean on the code under test.
    mod rand_distr_free_normal {
        use rand::Rng;
        pub fn draw<R: Rng>(rng: &mut R) -> f64 {
            let u1: f64 = 1.0 - rng.random::<f64>();
            let u2: f64 = rng.random();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        }
    }

    fn det(w: f64) -> WeightModel {
        WeightModel::constant(w, NoiseSpec::Deterministic, w).unwrap()
    }

    #[test]
    fn distinct_ratio_preconditions() {
        let mut s = UrnState::new(1.0, BaseMeasure::uniform()).unwrap();
        s.observe(Color::Point(0.5), 1.0);
        assert!(distinct_ratio(&s).is_err());
        s.observe(Color::Point(0.6), 1.0);
        assert_relative_eq!(distinct_ratio(&s).unwrap(), 2.0 / 2f64.ln());
        let mut d = UrnState::new(1.0, BaseMeasure::discrete(vec![0.5, 0.5]).unwrap()).unwrap();
        d.observe(Color::Label(0), 1.0);
        d.observe(Color::Label(1), 1.0);
        assert!(distinct_ratio(&d).is_err());
    }

    #[test]
    fn rate_statistic_cases() {
        let m = WeightModel::step_species(1.0, 2.0, 0.5, NoiseSpec::Deterministic, 2.0).unwrap();
        let mut s = UrnState::new(1.0, BaseMeasure::uniform()).unwrap();
        for _ in 0..4 {
            s.observe(Color::Point(0.7), 2.0);
        }
        assert_eq!(rate_statistic(&s, &m, ProbabilityKind::Empirical).unwrap(), 0.0);
        s.observe(Color::Point(0.2), 1.0);
        let want = 5f64.sqrt() * 0.2;
        assert_relative_eq!(rate_statistic(&s, &m, ProbabilityKind::Empirical).unwrap(), want);

        let mono = WeightModel::monotone(1.0, 2.0, NoiseSpec::Deterministic, 2.0).unwrap();
        assert!(matches!(
            rate_statistic(&s, &mono, ProbabilityKind::Predictive),
            Err(Error::HypothesisUnmet(_))
        ));
    }

    #[test]
    fn regression_exact_power_laws() {
        let series: Vec<(f64, f64)> = [1e3f64, 1e4, 1e5, 1e6].iter().map(|&n| (n, 3.0 * n.powf(-0.5))).collect();
        assert!((regression_exponent(&series).unwrap() + 0.5).abs() < 1e-9);
        let flat: Vec<(f64, f64)> = [1.0, 2.0, 3.0].iter().map(|&n| (n, 7.0)).collect();
        assert!(regression_exponent(&flat).unwrap().abs() < 1e-12);
        assert!(regression_exponent(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
        assert!(regression_exponent(&[(1.0, 1.0), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn clt_statistics_hand_values() {
        // n = 4 with P̂ = 0.75, P_n = 0.5: θ = 1, ν(A) = 0, three unit-weight
        // draws in A, one weight-2 draw outside.
        let mut s = UrnState::new(1.0, BaseMeasure::uniform()).unwrap();
        for x in [0.1, 0.2, 0.3] {
            s.observe(Color::Point(x), 1.0);
        }
        s.observe(Color::Point(0.9), 2.0);
        let a = SetExpr::points(&[0.1, 0.2, 0.3]).unwrap();
        assert_relative_eq!(s.predictive_probability(&a), 0.5);
        let c = clt_statistics(&s, &a, 0.25).unwrap();
        assert_relative_eq!(c.c_stat, 0.5);
        assert_relative_eq!(c.d_stat, 0.5);
        let same = clt_statistics(&s, &a, 0.5).unwrap();
        assert_eq!(same.d_stat, 0.0);
        assert!(clt_statistics(&s, &a, 1.5).is_err());
    }

    #[test]
    fn c_stat_vanishes_when_laws_agree() {
        let mut s = UrnState::new(1.0, BaseMeasure::uniform()).unwrap();
        s.observe(Color::Point(0.3), 1.0);
        // P̂({0.3}) = 1, P_1({0.3}) = ½; full space gives equality.
        let c = clt_statistics(&s, &SetExpr::full(), 1.0).unwrap();
        assert_eq!(c.c_stat, 0.0);
    }

    #[test]
    fn variance_estimators_hand_values() {
        let mut s = UrnState::new(1.0, BaseMeasure::uniform()).unwrap();
        s.observe(Color::Point(0.2), 1.0);
        s.observe(Color::Point(0.8), 3.0);
        let a = SetExpr::left_open(0.0, 0.5).unwrap();
        let e = variance_estimators(&s, &a).unwrap();
        assert_relative_eq!(e.m_n, 2.0);
        assert_relative_eq!(e.s_a, 0.5);
        assert_relative_eq!(e.s_ac, 4.5);
        assert_relative_eq!(e.pred_prob, 0.3);
        // ((0.7)²·0.5 + (0.3)²·4.5) / 4
        assert_relative_eq!(e.v_hat, 0.1625, epsilon = 1e-15);
        assert_relative_eq!(e.u_hat, 0.1625 - 0.21, epsilon = 1e-15);
        assert!((e.s_a + e.s_ac - s.sum_w2() / 2.0).abs() < 1e-12);

        let full = variance_estimators(&s, &SetExpr::full()).unwrap();
        assert_eq!(full.v_hat, 0.0);

        let empty = UrnState::new(1.0, BaseMeasure::uniform()).unwrap();
        assert_eq!(variance_estimators(&empty, &a), Err(Error::EmptyHistory));
    }

    #[test]
    fn deterministic_constant_weights_give_binomial_variance() {
        let m = det(2.0);
        let mut s = UrnState::new(1.0, BaseMeasure::uniform()).unwrap();
        let mut st = ReplicateStreams::new(8, 0);
        s.advance(&m, 20_000, &mut st);
        let a = SetExpr::left_open(0.0, 0.5).unwrap();
        let e = variance_estimators(&s, &a).unwrap();
        let emp = s.empirical_probability(&a).unwrap();
        let p = e.pred_prob;
        assert_relative_eq!(e.s_a, 4.0 * emp, epsilon = 1e-12);
        assert_relative_eq!(e.v_hat, (1.0 - p).powi(2) * emp + p * p * (1.0 - emp), epsilon = 1e-12);
        assert!(e.u_hat.abs() < 1e-3, "{}", e.u_hat);
    }

    #[test]
    fn credible_interval_cases() {
        let mut s = UrnState::new(1.0, BaseMeasure::uniform()).unwrap();
        assert!(credible_interval(&s, 0.5, 0.05).is_err());
        s.observe(Color::Point(0.3), 1.0);
        assert!(credible_interval(&s, 0.5, 1.0).is_err());
        assert!(credible_interval(&s, 0.5, 0.0).is_err());

        // Every draw inside [0,x]: A^c carries no squared weight and
        // (1 − F_n)² s_a is the only term.
        let ci = credible_interval(&s, 1.0, 0.05).unwrap();
        assert_eq!(ci.v_hat, 0.0);
        assert_eq!(ci.lo, ci.hi);
        assert!(ci.covers(ci.center) && !ci.covers(ci.center - 1e-12));
    }

    #[test]
    fn credible_interval_clamps_at_zero() {
        // F_n(x) = 0.02 with √(V/n) = 0.05 → lower end clamped.
        let ci = CredibleInterval {
            lo: (0.02 - two_sided_z(0.05) * 0.05f64).max(0.0),
            hi: 0.02 + two_sided_z(0.05) * 0.05,
            center: 0.02,
            v_hat: 1.0,
        };
        assert_eq!(ci.lo, 0.0);
        let m = WeightModel::constant(2.0, NoiseSpec::BernoulliScaled, 3.0).unwrap();
        let mut s = UrnState::new(1.0, BaseMeasure::uniform()).unwrap();
        let mut st = ReplicateStreams::new(9, 0);
        s.advance(&m, 50, &mut st);
        let ci = credible_interval(&s, 0.001, 0.05).unwrap();
        assert!(ci.lo >= 0.0 && ci.hi <= 1.0);
    }

    #[test]
    fn ks_edge_cases() {
        assert!(ks_distance(&[]).is_err());
        assert_relative_eq!(ks_distance(&[0.0; 10]).unwrap(), 0.5);
        assert!(ks_distance(&[1e6]).unwrap() > 1.0 - 1e-12);
        assert!(ks_distance(&[f64::NAN]).is_err());
    }

    #[test]
    fn ks_of_gaussian_sample_is_small() {
        let mut rng = CounterRng::new(123, 0, StreamRole::Color);
        let xs: Vec<f64> = (0..10_000).map(|_| gauss::draw(&mut rng)).collect();
        let d = ks_distance(&xs).unwrap();
        // 99% quantile of the KS null at R = 10^4 is ≈ 1.63/√R = 0.0163.
        assert!(d < 0.02, "{d}");
        let shifted: Vec<f64> = xs.iter().map(|x| x + 0.2).collect();
        assert!(ks_distance(&shifted).unwrap() > 0.05);
    }

    #[test]
    fn ks_matches_brute_force_sup() {
        let mut rng = CounterRng::new(5, 0, StreamRole::Color);
        let xs: Vec<f64> = (0..50).map(|_| gauss::draw(&mut rng)).collect();
        let d = ks_distance(&xs).unwrap();
        // sup over a fine grid of |F_emp − Φ|, from both sides of each jump
        let mut best: f64 = 0.0;
        for &x in &xs {
            for t in [x - 1e-12, x] {
                let f = xs.iter().filter(|&&y| y <= t).count() as f64 / xs.len() as f64;
                best = best.max((f - normal_cdf(t)).abs());
            }
        }
        assert!((d - best).abs() < 1e-9);
        let _ = rng.random::<f64>();
    }

    #[test]
    fn distance_to_dominant_cases() {
        let uni = WeightModel::unimodal(0.6, 2.0, 1.0, NoiseSpec::Deterministic, 2.0).unwrap();
        assert!((distance_to_dominant(&Color::Point(0.5), &uni) - 0.1).abs() < 1e-15);
        assert_eq!(distance_to_dominant(&Color::Point(0.6), &uni), 0.0);
        let sp = WeightModel::step_species(1.0, 2.0, 0.5, NoiseSpec::Deterministic, 2.0).unwrap();
        assert!((distance_to_dominant(&Color::Point(0.2), &sp) - 0.3).abs() < 1e-15);
        assert_eq!(distance_to_dominant(&Color::Point(0.7), &sp), 0.0);
    }
}
