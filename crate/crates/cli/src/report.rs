use std::fmt::Write as _;
use std::path::PathBuf;

use dps_core::montecarlo::{Experiment, ExperimentConfig, ReplicateSummary, Report, TrackedSet};
use serde::Serialize;

use crate::Failure;

const TOOL: &str = "dps";
const VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits, enough to round-trip any f64.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub const CSV_HEADER: &str = "replicate,n,probe_id,pred_prob,emp_prob,tv_pred_emp,sumw_over_n,L_n,dist_ratio";

/// One row per replicate, checkpoint and tracked set.
pub fn render_csv(reps: &[ReplicateSummary]) -> String {
    let mut s = String::new();
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in reps {
        for c in &r.trajectory.checkpoints {
            let ratio = c.distinct_ratio().map(num).unwrap_or_default();
            for (i, p) in c.probes.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{}",
                    r.replicate,
                    c.n,
                    i,
                    num(p.predictive),
                    num(p.empirical),
                    num(c.tv_pred_emp),
                    num(c.sum_w_over_n),
                    c.distinct,
                    ratio
                );
            }
        }
    }
    s
}

pub fn render_table(report: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<12} {:<28} {:>24} {:>22}  result", "suite", "verdict", "statistic", "threshold");
    for v in &report.verdicts {
        let _ = writeln!(
            s,
            "{:<12} {:<28} {:>24} {:>22}  {}",
            v.suite.name(),
            v.id,
            v.statistic,
            v.threshold.to_string(),
            if v.pass { "PASS" } else { "FAIL" }
        );
    }
    for k in &report.skipped {
        let _ = writeln!(s, "{:<12} skipped: {}", k.suite.name(), k.reason);
    }
    let passed = report.verdicts.iter().filter(|v| v.pass).count();
    let _ = writeln!(s, "{passed}/{} verdicts passed", report.verdicts.len());
    s
}

/// The deterministic record of a verify run: no timings, no thread count.
#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: ExperimentConfig,
    #[serde(flatten)]
    pub report: &'a Report,
    pub all_pass: bool,
}

impl<'a> Summary<'a> {
    pub fn new(cfg: &ExperimentConfig, report: &'a Report) -> Result<Self, Failure> {
        let mut config = cfg.clone();
        config.run.threads = 0;
        Ok(Summary {
            tool: TOOL,
            version: VERSION,
            config,
            report,
            all_pass: report.all_pass(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes") + "\n"
    }
}

#[derive(Debug, Serialize)]
pub struct VerdictTiming {
    pub id: String,
    pub pass: bool,
    pub runtime_secs: f64,
}

/// Everything needed to rerun: the effective configuration as TOML text, plus
/// timings and the files written.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_toml: String,
    pub tracked_sets: Vec<TrackedSet>,
    pub checkpoints: Vec<u64>,
    pub wall_time_secs: f64,
    pub verdicts: Vec<VerdictTiming>,
    pub files: Vec<PathBuf>,
}

impl Manifest {
    pub fn new(
        command: &'static str,
        cfg: &ExperimentConfig,
        exp: &Experiment,
        wall_time_secs: f64,
        verdicts: Vec<(String, bool, f64)>,
        files: Vec<PathBuf>,
    ) -> Result<Self, Failure> {
        let config_toml = toml::to_string(cfg).map_err(|e| Failure::Config(format!("cannot snapshot configuration: {e}")))?;
        Ok(Manifest {
            tool: TOOL,
            version: VERSION,
            command,
            config_toml,
            tracked_sets: exp.tracked_sets(),
            checkpoints: exp.checkpoints.clone(),
            wall_time_secs,
            verdicts: verdicts
                .into_iter()
                .map(|(id, pass, runtime_secs)| VerdictTiming { id, pass, runtime_secs })
                .collect(),
            files,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }
}
