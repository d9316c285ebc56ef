//! Replicated experiments: configuration, parallel replicate runs, and
//! pass/fail verdicts on the limit theorems.

pub mod config;
pub mod experiments;
pub mod replicate;

pub use config::{ConfigErrors, ConfigIssue, Experiment, ExperimentConfig, Thresholds};
pub use experiments::{
    check_applicable, clt_experiment, convergence_experiment, coverage_experiment, rate_experiment, verify, Report,
    Suite, Threshold, Verdict,
};
pub use replicate::{run_replicate, run_replicates, IntervalRecord, ReplicateSummary, SetRole, TrackedSet};
