//! Scenario files, curve tables and estimation runs behind the `ppsm` binary.

pub mod curve;
pub mod error;
pub mod estimate;
pub mod scenario;
pub mod table;

pub use curve::{run_curve, CurveKind};
pub use error::{CliError, Result};
pub use estimate::{run_estimate, EstimateRun, Mode};
pub use scenario::{Modulation, Scenario};
pub use table::{CurveRow, CurveTable, RegionFlag};
