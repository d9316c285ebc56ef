//! Verdicts on the limit theorems, computed from replicate summaries.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use super::config::Experiment;
use super::replicate::{run_replicates, ReplicateSummary, SetRole};
use crate::color::{Interval, SetExpr};
use crate::error::{invalid, Error, Result};
use crate::stats::{ks_distance, regression_exponent};
use crate::weights::ColorDomain;

/// `u_hat` below `10·EPS` counts as a degenerate `C_n` variance.
pub const EPS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Convergence,
    Rates,
    Clt,
    Coverage,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Convergence, Suite::Rates, Suite::Clt, Suite::Coverage];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Convergence => "convergence",
            Suite::Rates => "rates",
            Suite::Clt => "clt",
            Suite::Coverage => "coverage",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| invalid(format!("unknown suite '{s}' (convergence, rates, clt, coverage, all)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Threshold {
    AtMost { max: f64 },
    AtLeast { min: f64 },
    Within { target: f64, tol: f64 },
}

impl Threshold {
    /// NaN never passes.
    pub fn check(&self, x: f64) -> bool {
        match *self {
            Threshold::AtMost { max } => x <= max,
            Threshold::AtLeast { min } => x >= min,
            Threshold::Within { target, tol } => (x - target).abs() <= tol,
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Threshold::AtMost { max } => write!(f, "<= {max}"),
            Threshold::AtLeast { min } => write!(f, ">= {min}"),
            Threshold::Within { target, tol } => write!(f, "{target} +/- {tol}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub id: String,
    pub suite: Suite,
    pub claim: String,
    pub statistic: f64,
    pub threshold: Threshold,
    pub pass: bool,
    /// Wall time of the replicate pass plus evaluation; kept out of summaries.
    #[serde(skip)]
    pub runtime_secs: f64,
    pub diagnostics: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn new(id: impl Into<String>, suite: Suite, claim: impl Into<String>, statistic: f64, threshold: Threshold) -> Self {
        Verdict {
            id: id.into(),
            suite,
            claim: claim.into(),
            statistic,
            threshold,
            pass: threshold.check(statistic),
            runtime_secs: 0.0,
            diagnostics: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    fn diag(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_string(), value);
        self
    }

    fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skipped {
    pub suite: Suite,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suites: Vec<Suite>,
    pub skipped: Vec<Skipped>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip)]
    pub runtime_secs: f64,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (m, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, var.sqrt())
}

fn hypothesis(msg: String) -> Error {
    Error::HypothesisUnmet(msg)
}

/// Why `suite` would test nothing for this experiment, if it would not.
pub fn check_applicable(exp: &Experiment, suite: Suite) -> Result<()> {
    let m = &exp.model;
    let dc = m.dominant().complement();
    match suite {
        Suite::Convergence => Ok(()),
        Suite::Rates => {
            if dc.is_empty() || exp.base.measure(&dc) == 0.0 {
                return Err(hypothesis(format!(
                    "the complement of the dominant set of {m} is empty or null under the base measure, so there is no decay to measure"
                )));
            }
            if m.gamma() <= 0.0 {
                return Err(hypothesis(format!(
                    "{m} has w_bar = w_bar_c, so the decay exponent gamma is 0 and no polynomial rate is claimed"
                )));
            }
            if exp.checkpoints.len() < 3 {
                return Err(invalid("rate regression needs at least 3 checkpoints"));
            }
            Ok(())
        }
        Suite::Clt | Suite::Coverage => {
            if !m.clt_hypothesis() {
                return Err(hypothesis(format!(
                    "{m} has w_bar = {} <= 2 w_bar_c = {}; the central limit theorem needs w_bar > 2 w_bar_c and the condition cannot be weakened",
                    m.w_bar(),
                    2.0 * m.w_bar_c()
                )));
            }
            if suite == Suite::Clt {
                if exp.probes.is_empty() {
                    return Err(invalid("the clt suite needs at least one probe set"));
                }
                for a in &exp.probes {
                    let nu = exp.base.measure(a);
                    if !(nu > 0.0 && nu < 1.0) {
                        return Err(hypothesis(format!("probe {a} has base measure {nu}; need 0 < nu(A) < 1")));
                    }
                    if a.intersection(m.dominant()).is_empty() {
                        return Err(hypothesis(format!("probe {a} does not meet the dominant set {}", m.dominant())));
                    }
                }
            } else {
                if matches!(m.domain(), ColorDomain::Labels(_)) || exp.base.num_labels() > 0 {
                    return Err(hypothesis("credible intervals for F(x) need colors on [0,1] and a diffuse base".into()));
                }
                let on_line = m.dominant().intersection(&SetExpr::unit_interval());
                if on_line.intervals().len() != 1 {
                    return Err(hypothesis(format!("dominant set {} is not a single interval", m.dominant())));
                }
                if exp.x_grid.is_empty() {
                    return Err(invalid("the coverage suite needs a nonempty x_grid"));
                }
            }
            Ok(())
        }
    }
}

fn convergence(exp: &Experiment, reps: &[ReplicateSummary]) -> Vec<Verdict> {
    let m = &exp.model;
    let t = &exp.thresholds;
    let s = Suite::Convergence;
    let mut out = Vec::new();

    let sum_w: Vec<f64> = reps.iter().map(|r| r.terminal().sum_w_over_n).collect();
    let (mean, sd) = mean_sd(&sum_w);
    out.push(
        Verdict::new(
            "mean-weight",
            s,
            "median (1/n) sum W_i approaches w_bar",
            median(&sum_w),
            Threshold::Within {
                target: m.w_bar(),
                tol: t.mean_weight_tol,
            },
        )
        .diag("mean", mean)
        .diag("sd", sd),
    );

    let pred_at = |role: SetRole| {
        exp.tracked_index(role)
            .map(|i| reps.iter().map(|r| r.terminal().probes[i].predictive).collect::<Vec<_>>())
    };

    if let Some(p) = pred_at(SetRole::DominantComplement) {
        if m.w_bar() > m.w_bar_c() {
            out.push(
                Verdict::new(
                    "dominant-complement",
                    s,
                    "median P_n(D^c) vanishes",
                    median(&p),
                    Threshold::AtMost {
                        max: t.dominant_complement_max,
                    },
                )
                .diag("mean", mean_sd(&p).0)
                .diag("max", p.iter().copied().fold(f64::NAN, f64::max)),
            );
        }
    }
    if let Some(p) = pred_at(SetRole::NeighborhoodComplement) {
        out.push(
            Verdict::new(
                "neighborhood-complement",
                s,
                format!("median P_n of the complement of the {}-neighborhood of D vanishes", t.neighborhood_delta),
                median(&p),
                Threshold::AtMost {
                    max: t.neighborhood_complement_max,
                },
            )
            .diag("delta", t.neighborhood_delta)
            .diag("mean", mean_sd(&p).0),
        );
    }

    if m.w_bar() > m.w_bar_c() {
        let tv: Vec<f64> = reps.iter().map(|r| r.terminal().tv_pred_emp).collect();
        out.push(
            Verdict::new(
                "tv-pred-emp",
                s,
                "median TV(P_n, empirical) vanishes",
                median(&tv),
                Threshold::AtMost { max: t.tv_max },
            )
            .diag("mean", mean_sd(&tv).0),
        );
        let from = t
            .tv_decrease_from
            .or_else(|| exp.checkpoints.iter().copied().filter(|&c| c <= exp.n / 10).max());
        match from.and_then(|f| exp.checkpoints.iter().position(|&c| c == f)) {
            Some(i) => {
                let decreased = reps
                    .iter()
                    .filter(|r| r.terminal().tv_pred_emp < r.trajectory.checkpoints[i].tv_pred_emp)
                    .count();
                out.push(
                    Verdict::new(
                        "tv-decrease",
                        s,
                        format!("share of replicates whose TV falls from n = {} to n = {}", exp.checkpoints[i], exp.n),
                        decreased as f64 / reps.len() as f64,
                        Threshold::AtLeast {
                            min: t.tv_decrease_min_fraction,
                        },
                    )
                    .diag("from_n", exp.checkpoints[i] as f64),
                );
            }
            None => {}
        }
    }

    if let Some(tol) = t.distinct_ratio_rel_tol {
        if exp.base.is_diffuse() {
            let target = exp.theta / m.w_bar();
            let ratios: Vec<f64> = reps.iter().filter_map(|r| r.terminal().distinct_ratio()).collect();
            let (mean, sd) = mean_sd(&ratios);
            out.push(
                Verdict::new(
                    "distinct-ratio",
                    s,
                    "mean L_n / log n approaches theta / w_bar",
                    mean,
                    Threshold::Within {
                        target,
                        tol: tol * target,
                    },
                )
                .diag("sd", sd)
                .diag("se", sd / (ratios.len() as f64).sqrt()),
            );
        }
    }
    out
}

fn rates(exp: &Experiment, reps: &[ReplicateSummary]) -> Vec<Verdict> {
    let m = &exp.model;
    let t = &exp.thresholds;
    let s = Suite::Rates;
    let i = exp
        .tracked_index(SetRole::DominantComplement)
        .expect("applicability check guarantees a dominant complement");
    let gamma = m.gamma();

    let mut slopes = Vec::new();
    let mut ratios = Vec::new();
    let mut xi = Vec::new();
    for r in reps {
        let series: Vec<(f64, f64)> = r
            .trajectory
            .checkpoints
            .iter()
            .map(|c| (c.n as f64, c.probes[i].empirical))
            .collect();
        if let Ok(slope) = regression_exponent(&series) {
            slopes.push(slope);
        }
        let term = &r.terminal().probes[i];
        if term.empirical > 0.0 {
            ratios.push(term.predictive / term.empirical);
        }
        xi.push((exp.n as f64).powf(gamma) * term.empirical);
    }
    let (xi_mean, xi_sd) = mean_sd(&xi);
    let (ratio_mean, ratio_sd) = mean_sd(&ratios);
    vec![
        Verdict::new(
            "rate-slope",
            s,
            "median log-log slope of the empirical mass off D matches -gamma",
            median(&slopes),
            Threshold::Within {
                target: -gamma,
                tol: t.slope_tol,
            },
        )
        .diag("replicates_used", slopes.len() as f64)
        .diag("excluded", (reps.len() - slopes.len()) as f64)
        .diag("xi_mean", xi_mean)
        .diag("xi_sd", xi_sd),
        Verdict::new(
            "rate-ratio",
            s,
            "mean ratio of predictive to empirical rate statistic matches w_bar_c / w_bar",
            ratio_mean,
            Threshold::Within {
                target: m.w_bar_c() / m.w_bar(),
                tol: t.ratio_tol,
            },
        )
        .diag("replicates_used", ratios.len() as f64)
        .diag("sd", ratio_sd),
    ]
}

const UNCONDITIONAL: &str =
    "KS compares the unconditional law across replicates, a weaker consequence of the conditional limit";

fn clt(exp: &Experiment, reps: &[ReplicateSummary]) -> Vec<Verdict> {
    let t = &exp.thresholds;
    let s = Suite::Clt;
    let mut out = Vec::new();
    for (pi, probe) in exp.probes.iter().enumerate() {
        let samples: Vec<_> = reps.iter().map(|r| &r.clt[pi]).collect();
        let total = samples.len() as f64;

        let d: Vec<f64> = samples
            .iter()
            .filter(|c| c.v_hat > 0.0)
            .map(|c| c.d_stat / c.v_hat.sqrt())
            .collect();
        out.push(ks_verdict(
            format!("clt-d{probe}"),
            "D_n(A) standardized by the plug-in V is standard normal",
            &d,
            total,
            t.ks_d_max,
        ));

        let floor = |v: f64| (10.0 * EPS).max(t.clt_u_rel_floor * v);
        let c: Vec<f64> = samples
            .iter()
            .filter(|c| c.u_hat >= floor(c.v_hat))
            .map(|c| c.c_stat / c.u_hat.max(EPS).sqrt())
            .collect();
        let excluded = (total - c.len() as f64) / total;
        if excluded >= 0.5 {
            out.push(
                Verdict::new(
                    format!("clt-c-degenerate{probe}"),
                    s,
                    "plug-in U vanishes for most replicates: the limit of C_n(A) is degenerate, reported instead of tested",
                    excluded,
                    Threshold::AtLeast { min: 0.5 },
                )
                .diag("u_hat_mean", mean_sd(&samples.iter().map(|c| c.u_hat).collect::<Vec<_>>()).0),
            );
        } else {
            out.push(ks_verdict(
                format!("clt-c{probe}"),
                "C_n(A) standardized by the plug-in U is standard normal",
                &c,
                total,
                t.ks_c_max,
            ));
        }

        let sum: Vec<f64> = samples
            .iter()
            .filter(|c| c.u_hat + c.v_hat > 10.0 * EPS)
            .map(|c| (c.c_stat + c.d_stat) / (c.u_hat + c.v_hat).sqrt())
            .collect();
        out.push(ks_verdict(
            format!("clt-sum{probe}"),
            "C_n(A) + D_n(A) standardized by the plug-in U + V is standard normal",
            &sum,
            total,
            t.ks_sum_max,
        ));
    }
    out
}

fn ks_verdict(id: String, claim: &str, sample: &[f64], total: f64, max: f64) -> Verdict {
    let ks = ks_distance(sample).unwrap_or(f64::NAN);
    let (mean, sd) = mean_sd(sample);
    Verdict::new(id, Suite::Clt, claim, ks, Threshold::AtMost { max })
        .diag("replicates_used", sample.len() as f64)
        .diag("excluded", total - sample.len() as f64)
        .diag("mean", mean)
        .diag("sd", sd)
        .note(UNCONDITIONAL)
}

fn coverage(exp: &Experiment, reps: &[ReplicateSummary]) -> Vec<Verdict> {
    let t = &exp.thresholds;
    let min = ((1.0 - exp.alpha - t.coverage_slack) * 1e12).round() / 1e12;
    let mut out = Vec::new();
    for (xi, &x) in exp.x_grid.iter().enumerate() {
        let recs: Vec<_> = reps.iter().map(|r| &r.intervals[xi]).collect();
        let covered = recs.iter().filter(|r| r.interval.covers(r.oracle)).count();
        let degenerate = recs.iter().filter(|r| r.interval.v_hat == 0.0).count();
        let widths: Vec<f64> = recs.iter().map(|r| r.interval.width()).collect();
        let nu = Interval::closed(0.0, x)
            .map(|iv| exp.base.measure(&SetExpr::interval(iv)))
            .unwrap_or(f64::NAN);
        let mut v = Verdict::new(
            format!("coverage@{x}"),
            Suite::Coverage,
            format!("credible interval for F({x}) covers the limit at level 1 - {}", exp.alpha),
            covered as f64 / recs.len() as f64,
            Threshold::AtLeast { min },
        )
        .diag("mean_width", mean_sd(&widths).0)
        .diag("degenerate", degenerate as f64)
        .diag("base_mass", nu);
        if !(nu > 0.1 && nu < 0.9) {
            v.pass = true;
            v = v.note("base mass of [0,x] outside (0.1, 0.9): reported, not tested");
        }
        out.push(v);
    }
    out
}

/// Runs one replicate pass shared by all `suites` and evaluates them.
///
/// With `strict`, an inapplicable suite is an error; otherwise it is listed
/// under `skipped`.
pub fn verify(exp: &Experiment, suites: &[Suite], strict: bool) -> Result<Report> {
    let start = Instant::now();
    let mut run = Vec::new();
    let mut skipped = Vec::new();
    for &s in suites {
        match check_applicable(exp, s) {
            Ok(()) => run.push(s),
            Err(e) if !strict => skipped.push(Skipped {
                suite: s,
                reason: e.to_string(),
            }),
            Err(e) => return Err(e),
        }
    }
    let oracle = run.iter().any(|s| matches!(s, Suite::Clt | Suite::Coverage));
    let reps = if run.is_empty() {
        Vec::new()
    } else {
        run_replicates(exp, oracle)?
    };
    let mut verdicts = Vec::new();
    for &s in &run {
        verdicts.extend(match s {
            Suite::Convergence => convergence(exp, &reps),
            Suite::Rates => rates(exp, &reps),
            Suite::Clt => clt(exp, &reps),
            Suite::Coverage => coverage(exp, &reps),
        });
    }
    let runtime = start.elapsed().as_secs_f64();
    for v in &mut verdicts {
        v.runtime_secs = runtime;
    }
    Ok(Report {
        suites: run,
        skipped,
        verdicts,
        runtime_secs: runtime,
    })
}

pub fn convergence_experiment(exp: &Experiment) -> Result<Vec<Verdict>> {
    Ok(verify(exp, &[Suite::Convergence], true)?.verdicts)
}

pub fn rate_experiment(exp: &Experiment) -> Result<Vec<Verdict>> {
    Ok(verify(exp, &[Suite::Rates], true)?.verdicts)
}

pub fn clt_experiment(exp: &Experiment) -> Result<Vec<Verdict>> {
    Ok(verify(exp, &[Suite::Clt], true)?.verdicts)
}

pub fn coverage_experiment(exp: &Experiment) -> Result<Vec<Verdict>> {
    Ok(verify(exp, &[Suite::Coverage], true)?.verdicts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::config::{ExperimentConfig, IndexChoice, RunSpec, Thresholds};

    fn exp(preset: &str, n: u64, reps: u32, probes: &[&str], x_grid: Vec<f64>) -> Experiment {
        ExperimentConfig {
            preset: Some(preset.into()),
            model: None,
            base: None,
            run: RunSpec {
                n,
                replicates: reps,
                seed: 11,
                oracle_factor: 5,
                probes: probes.iter().map(|s| s.to_string()).collect(),
                checkpoints: None,
                checkpoint_start: 100,
                checkpoint_ratio: 10f64.sqrt(),
                alpha: 0.05,
                x_grid,
                threads: 0,
                index: IndexChoice::Fenwick,
            },
            thresholds: Thresholds::default(),
        }
        .build()
        .unwrap()
    }

    #[test]
    fn thresholds() {
        assert!(Threshold::AtMost { max: 0.02 }.check(0.02));
        assert!(!Threshold::AtMost { max: 0.02 }.check(f64::NAN));
        assert!(Threshold::Within { target: -0.5, tol: 0.12 }.check(-0.6));
        assert!(!Threshold::AtLeast { min: 0.9 }.check(0.89));
        assert_eq!(Threshold::Within { target: 0.5, tol: 0.15 }.to_string(), "0.5 +/- 0.15");
    }

    #[test]
    fn median_and_moments() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
        let (m, sd) = mean_sd(&[1.0, 2.0, 3.0]);
        assert_eq!((m, sd), (2.0, 1.0));
    }

    #[test]
    fn suites_parse() {
        assert_eq!("clt".parse::<Suite>().unwrap(), Suite::Clt);
        assert!("all".parse::<Suite>().is_err());
    }

    #[test]
    fn constant_model_gets_only_weight_and_tv_claims() {
        let e = exp("polya", 2000, 8, &[], vec![]);
        let ids: Vec<_> = convergence_experiment(&e).unwrap().into_iter().map(|v| v.id).collect();
        assert_eq!(ids, vec!["mean-weight", "tv-pred-emp", "tv-decrease"]);
    }

    #[test]
    fn inapplicable_suites_are_refused() {
        let mono = exp("monotone-default", 1000, 2, &["(0.5,0.75]"], vec![0.6]);
        for s in [Suite::Rates, Suite::Clt, Suite::Coverage] {
            assert!(matches!(verify(&mono, &[s], true), Err(Error::HypothesisUnmet(_))), "{s}");
        }
        let polya = exp("polya", 1000, 2, &[], vec![]);
        assert!(matches!(rate_experiment(&polya), Err(Error::HypothesisUnmet(_))));
        let boundary = exp("species-default", 1000, 2, &["(0.5,0.75]"], vec![]);
        let err = clt_experiment(&boundary).unwrap_err().to_string();
        assert!(err.contains("cannot be weakened"), "{err}");

        let report = verify(&mono, &Suite::ALL, false).unwrap();
        assert_eq!(report.suites, vec![Suite::Convergence]);
        assert_eq!(report.skipped.len(), 3);
    }

    #[test]
    fn monotone_mass_off_the_top_color_stays_one() {
        let e = exp("monotone-default", 1000, 4, &["{1}"], vec![]);
        let reps = run_replicates(&e, false).unwrap();
        for r in &reps {
            for c in &r.trajectory.checkpoints {
                assert_eq!(c.probes[0].predictive, 0.0);
            }
        }
    }

    #[test]
    fn degenerate_c_path_is_reported_not_failed() {
        let e = exp("polya", 2000, 40, &["(0,0.5]"], vec![]);
        let mut e = e;
        e.model = crate::weights::WeightModel::constant(1.0, crate::weights::NoiseSpec::Deterministic, 1.0).unwrap();
        let v = verify(&e, &[Suite::Clt], true).unwrap();
        let c = v.verdicts.iter().find(|v| v.id.starts_with("clt-c")).unwrap();
        assert!(c.id.starts_with("clt-c-degenerate"), "{}", c.id);
        assert!(c.pass);
    }

    #[test]
    fn coverage_runs_and_reports_per_x() {
        let e = exp("species-clt", 1000, 20, &[], vec![0.05, 0.6]);
        let v = coverage_experiment(&e).unwrap();
        assert_eq!(v.len(), 2);
        assert!(v[0].pass && !v[0].notes.is_empty());
        assert!(v[1].diagnostics["mean_width"] > 0.0);
    }
}
