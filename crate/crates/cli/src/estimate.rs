//! Replicated estimation runs against a simulated coupling.

use std::fmt::Write as _;

use ppsm_core::estimation::{
    adaptive_protocol, run_replications, single_stage, AdaptiveConfig, AdaptiveTrace, ReplicationSummary,
    SimulatedOracle,
};
use ppsm_core::fisher::cfi;
use ppsm_core::numerics::RngStream;
use ppsm_core::{CouplingConfig, PpsmSetup};

use crate::error::{CliError, Result};
use crate::scenario::Scenario;
use crate::table::ReplicationRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Whole budget at the first angle of the scenario.
    Single,
    /// Three-stage modulated protocol.
    Adaptive,
}

#[derive(Debug, Clone)]
pub struct EstimateRun {
    pub mode: Mode,
    /// Trials per replication, across all stages.
    pub budget: u64,
    pub summary: ReplicationSummary,
    /// Reference bound: `1/(n I(g_true))` for single runs, `1/(N3 I_max)` for adaptive runs.
    pub reference_bound: f64,
    /// Trace of replication 0 (adaptive mode).
    pub trace: Option<AdaptiveTrace>,
}

impl EstimateRun {
    /// One CSV row per replication; failed replications carry `nan`.
    pub fn rows(&self, replications: u64) -> Vec<ReplicationRow> {
        (0..replications)
            .map(|r| match self.summary.reports.iter().find(|(i, _)| *i == r) {
                Some((_, rep)) => ReplicationRow {
                    replication: r,
                    g_hat: rep.g_hat,
                    stderr: rep.stderr_hat,
                    crb_ratio: rep.crb_ratio,
                },
                None => ReplicationRow {
                    replication: r,
                    g_hat: f64::NAN,
                    stderr: f64::NAN,
                    crb_ratio: f64::NAN,
                },
            })
            .collect()
    }

    /// First failure, if any, as an error.
    pub fn first_failure(&self) -> Option<CliError> {
        self.summary.failures.first().map(|(_, e)| CliError::Core(e.clone()))
    }

    pub fn report(&self) -> String {
        let s = &self.summary;
        let mut out = String::new();
        let mode = match self.mode {
            Mode::Single => "single-stage",
            Mode::Adaptive => "adaptive",
        };
        let _ = writeln!(out, "mode: {mode}");
        let _ = writeln!(out, "replications: {} ok, {} failed", s.successes(), s.failures.len());
        let _ = writeln!(out, "trials per replication: {}", self.budget);
        let _ = writeln!(out, "mean g_hat: {:.10e}", s.mean_estimate());
        let mean_se = s.reports.iter().map(|(_, r)| r.stderr_hat).sum::<f64>() / s.successes().max(1) as f64;
        let _ = writeln!(out, "mean stderr: {mean_se:.6e}");
        let _ = writeln!(out, "mean fisher bound: {:.6e}", s.mean_fisher_bound());
        let _ = writeln!(out, "mean crb_ratio: {:.4}", s.mean_crb_ratio());
        let _ = writeln!(out, "reference bound: {:.6e}", self.reference_bound);
        if s.successes() >= 2 {
            let _ = writeln!(out, "empirical variance: {:.6e}", s.empirical_variance());
            let _ = writeln!(out, "variance / reference bound: {:.4}", s.variance_ratio(self.reference_bound));
        }
        if let Some(t) = &self.trace {
            let _ = writeln!(out, "stage trace (replication 0):");
            for st in &t.stages {
                let _ = writeln!(
                    out,
                    "  {:<9} phi {:.4} g_mod {:+.6e} trials {:>8} successes {:>7} estimate {:+.10e} stderr {:.3e}",
                    st.stage.to_string(),
                    st.phi,
                    st.modulation,
                    st.trials,
                    st.n_success,
                    st.estimate,
                    st.stderr
                );
            }
        }
        for (r, e) in &s.failures {
            let _ = writeln!(out, "replication {r} failed: {e}");
        }
        out
    }
}

pub fn run_estimate(scenario: &Scenario, mode: Mode) -> Result<EstimateRun> {
    scenario.validate()?;
    if scenario.n_total < 1000 {
        return Err(CliError::Validation(format!(
            "n_total must be at least 1000, got {}",
            scenario.n_total
        )));
    }
    let pointer = scenario.pointer()?;
    let oracle = SimulatedOracle::new(scenario.g_true, pointer);
    let prior = scenario.g_range()?;
    match mode {
        Mode::Single => {
            let phi = *scenario
                .phis
                .first()
                .ok_or_else(|| CliError::Validation("single-stage estimation needs a phi value".into()))?;
            let g_mod = scenario.modulation_for(phi, scenario.g_true)?;
            let truth = PpsmSetup::optimal(pointer, CouplingConfig::new(scenario.g_true, g_mod), phi);
            let reference_bound = 1.0 / (scenario.n_total as f64 * cfi(&truth)?);
            let summary = run_replications(scenario.seed, scenario.replications, |rng| {
                single_stage(&oracle, phi, g_mod, scenario.n_total, prior, rng)
            });
            Ok(EstimateRun {
                mode,
                budget: scenario.n_total,
                summary,
                reference_bound,
                trace: None,
            })
        }
        Mode::Adaptive => {
            let mut config = AdaptiveConfig::new(scenario.case, scenario.n_total, pointer, scenario.phi_final, prior);
            config.fraction = scenario.fraction;
            config.validate()?;
            let n3 = config.split.allocate(scenario.n_total)[2];
            let reference_bound = 1.0 / (n3 as f64 * pointer.max_information());
            let summary = run_replications(scenario.seed, scenario.replications, |rng| {
                adaptive_protocol(&oracle, &config, rng).map(|o| o.report)
            });
            let trace = match adaptive_protocol(&oracle, &config, &mut RngStream::new(scenario.seed, 0)) {
                Ok(o) => Some(o.trace),
                Err(ppsm_core::Error::RegionMiss { trace, .. }) => Some(*trace),
                Err(_) => None,
            };
            Ok(EstimateRun {
                mode,
                budget: scenario.n_total,
                summary,
                reference_bound,
                trace,
            })
        }
    }
}
