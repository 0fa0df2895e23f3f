use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{Interval, NeumaierSum, RngStream};
use crate::state::{CouplingConfig, PpsmSetup};

use super::adaptive::CouplingOracle;
use super::likelihood::{mle, EstimationReport};

/// Aggregate of independent replications, in replication order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationSummary {
    /// `(replication index, report)` for every successful run.
    pub reports: Vec<(u64, EstimationReport)>,
    /// `(replication index, error)` for every failed run.
    pub failures: Vec<(u64, Error)>,
}

impl ReplicationSummary {
    pub fn successes(&self) -> usize {
        self.reports.len()
    }

    pub fn mean_estimate(&self) -> f64 {
        self.mean_of(|r| r.g_hat)
    }

    /// Unbiased sample variance of `g_hat`.
    pub fn empirical_variance(&self) -> f64 {
        let n = self.reports.len();
        if n < 2 {
            return f64::NAN;
        }
        let m = self.mean_estimate();
        let ss: NeumaierSum = self.reports.iter().map(|(_, r)| (r.g_hat - m).powi(2)).collect();
        ss.value() / (n - 1) as f64
    }

    pub fn mean_fisher_bound(&self) -> f64 {
        self.mean_of(|r| r.fisher_bound)
    }

    pub fn mean_crb_ratio(&self) -> f64 {
        self.mean_of(|r| r.crb_ratio)
    }

    /// Empirical variance over a reference Cramér–Rao bound.
    pub fn variance_ratio(&self, bound: f64) -> f64 {
        self.empirical_variance() / bound
    }

    fn mean_of(&self, f: impl Fn(&EstimationReport) -> f64) -> f64 {
        if self.reports.is_empty() {
            return f64::NAN;
        }
        let s: NeumaierSum = self.reports.iter().map(|(_, r)| f(r)).collect();
        s.value() / self.reports.len() as f64
    }
}

/// Run `replications` independent estimates in parallel. Replication `r`
/// draws from `RngStream::new(seed, r)`, so results do not depend on the
/// thread count.
pub fn run_replications<F>(seed: u64, replications: u64, run: F) -> ReplicationSummary
where
    F: Fn(&mut RngStream) -> Result<EstimationReport> + Sync,
{
    let outcomes: Vec<(u64, Result<EstimationReport>)> = (0..replications)
        .into_par_iter()
        .map(|r| (r, run(&mut RngStream::new(seed, r))))
        .collect();
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (r, o) in outcomes {
        match o {
            Ok(rep) => reports.push((r, rep)),
            Err(e) => failures.push((r, e)),
        }
    }
    ReplicationSummary { reports, failures }
}

/// Unadaptive estimate: the whole budget at one angle and modulation.
pub fn single_stage<O: CouplingOracle + ?Sized>(
    oracle: &O,
    phi: f64,
    modulation: f64,
    budget: u64,
    search: Interval,
    rng: &mut RngStream,
) -> Result<EstimationReport> {
    let template = PpsmSetup::optimal(oracle.pointer(), CouplingConfig::new(0.0, modulation), phi);
    let record = oracle.measure(phi, modulation, budget, rng)?;
    mle(&record, &template, search)
}
