//! Independent replicate trajectories on a worker pool.

use rayon::prelude::*;
use serde::Serialize;

use super::config::Experiment;
use crate::color::SetExpr;
use crate::error::{invalid, Result};
use crate::rng::ReplicateStreams;
use crate::stats::{clt_statistics, credible_interval, CltSample, CredibleInterval};
use crate::urn::{Trajectory, UrnState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetRole {
    Probe,
    DominantComplement,
    NeighborhoodComplement,
}

/// A set whose probabilities are recorded at every checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackedSet {
    pub label: String,
    #[serde(skip)]
    pub set: SetExpr,
    pub role: SetRole,
}

impl Experiment {
    /// Probes first, then `D^c` and `D_δ^c` when they are nonempty.
    pub fn tracked_sets(&self) -> Vec<TrackedSet> {
        let mut out: Vec<TrackedSet> = self
            .probes
            .iter()
            .map(|set| TrackedSet {
                label: set.to_string(),
                set: set.clone(),
                role: SetRole::Probe,
            })
            .collect();
        let domain = self.model.domain().set();
        let dc = self.model.dominant().complement().intersection(&domain);
        if !dc.is_empty() {
            out.push(TrackedSet {
                label: dc.to_string(),
                set: dc,
                role: SetRole::DominantComplement,
            });
        }
        let nc = self
            .model
            .dominant_neighborhood(self.thresholds.neighborhood_delta)
            .complement()
            .intersection(&domain);
        if !nc.is_empty() {
            out.push(TrackedSet {
                label: nc.to_string(),
                set: nc,
                role: SetRole::NeighborhoodComplement,
            });
        }
        out
    }

    pub fn tracked_index(&self, role: SetRole) -> Option<usize> {
        self.tracked_sets().iter().position(|t| t.role == role)
    }

    /// `N = K·n`, the horizon of the limit-measure proxy.
    pub fn oracle_horizon(&self) -> u64 {
        self.n * self.oracle_factor
    }
}

/// A credible interval at horizon `n` and the proxy of the limit it targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalRecord {
    pub x: f64,
    pub interval: CredibleInterval,
    /// `F_N(x)` at the oracle horizon.
    pub oracle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateSummary {
    pub replicate: u32,
    /// Probabilities of [`Experiment::tracked_sets`] at each checkpoint.
    pub trajectory: Trajectory,
    /// Terminal statistics per probe, targeted at `P̂_N(A)`; empty without an oracle run.
    pub clt: Vec<CltSample>,
    /// Credible intervals per `x_grid` point; empty without an oracle run.
    pub intervals: Vec<IntervalRecord>,
}

impl ReplicateSummary {
    pub fn terminal(&self) -> &crate::urn::Checkpoint {
        self.trajectory.checkpoints.last().expect("trajectories end at the horizon")
    }
}

/// Runs one replicate; with `oracle` it continues the same streams to `K·n`.
pub fn run_replicate(exp: &Experiment, replicate: u32, oracle: bool) -> Result<ReplicateSummary> {
    let sets: Vec<SetExpr> = exp.tracked_sets().into_iter().map(|t| t.set).collect();
    let mut streams = ReplicateStreams::new(exp.seed, replicate);
    let mut state = UrnState::with_index(exp.theta, exp.base.clone(), exp.index)?;
    let trajectory = state.run(&exp.model, exp.n, &exp.checkpoints, &sets, &mut streams)?;

    let mut clt = Vec::new();
    let mut intervals = Vec::new();
    if oracle {
        for (i, probe) in exp.probes.iter().enumerate() {
            let mut s = clt_statistics(&state, probe, state.predictive_probability(probe))?;
            s.replicate = replicate;
            s.probe = i;
            clt.push(s);
        }
        let mut pending = Vec::new();
        for &x in &exp.x_grid {
            pending.push((x, credible_interval(&state, x, exp.alpha)?));
        }
        state.advance(&exp.model, exp.oracle_horizon() - exp.n, &mut streams);
        for (s, probe) in clt.iter_mut().zip(&exp.probes) {
            *s = s.clone().with_oracle(state.empirical_probability(probe)?);
        }
        for (x, interval) in pending {
            let oracle = state.predictive_probability(&SetExpr::interval(crate::color::Interval::closed(0.0, x)?));
            intervals.push(IntervalRecord { x, interval, oracle });
        }
    }
    Ok(ReplicateSummary {
        replicate,
        trajectory,
        clt,
        intervals,
    })
}

/// All replicates, in replicate order whatever the thread count.
pub fn run_replicates(exp: &Experiment, oracle: bool) -> Result<Vec<ReplicateSummary>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(exp.threads)
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        (0..exp.replicates)
            .into_par_iter()
            .map(|r| run_replicate(exp, r, oracle))
            .collect()
    })
}
