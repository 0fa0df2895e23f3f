//! Monte Carlo measurement records, maximum-likelihood estimation of `g`,
//! Cramér–Rao studies and the three-stage adaptive modulation protocol.

mod adaptive;
mod likelihood;
mod sampling;
mod study;

pub use adaptive::{
    adaptive_protocol, AdaptiveConfig, AdaptiveOutcome, AdaptiveTrace, BudgetSplit,
    CouplingOracle, SimulatedOracle, Stage, StageRecord,
};
pub use likelihood::{log_likelihood, mle, mle_with, EstimationReport, MleOptions};
pub use sampling::{sample_record, InverseCdf, MeasurementRecord};
pub use study::{run_replications, single_stage, ReplicationSummary};
