//! Curve generation over a coupling grid.

use std::fmt;
use std::str::FromStr;

use ppsm_core::fisher::{fisher_report, region_bounds, sensitivity};
use ppsm_core::pps::{pointer_shift, post_selection_probability};
use ppsm_core::{CouplingConfig, PpsmSetup};

use crate::error::{CliError, Result};
use crate::scenario::Scenario;
use crate::table::{CurveRow, CurveTable, RegionFlag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    /// Mean pointer shift `<q> - q0`.
    Shift,
    /// Slope of the shift.
    Sensitivity,
    /// Classical Fisher information per trial.
    Cfi,
    /// Post-selection probability.
    Psel,
    /// Quantum Fisher information kept by the post-selected pointer.
    Fd,
}

impl FromStr for CurveKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "shift" => Ok(CurveKind::Shift),
            "sensitivity" => Ok(CurveKind::Sensitivity),
            "cfi" => Ok(CurveKind::Cfi),
            "psel" => Ok(CurveKind::Psel),
            "fd" => Ok(CurveKind::Fd),
            other => Err(CliError::Validation(format!(
                "unknown curve kind '{other}' (expected shift, sensitivity, cfi, psel or fd)"
            ))),
        }
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveKind::Shift => "shift",
            CurveKind::Sensitivity => "sensitivity",
            CurveKind::Cfi => "cfi",
            CurveKind::Psel => "psel",
            CurveKind::Fd => "fd",
        })
    }
}

/// One row per grid point and angle. Every row with a defined conditional
/// density is checked against `cfi <= fd <= 4q0² + 2σ²`.
pub fn run_curve(scenario: &Scenario, kind: CurveKind) -> Result<CurveTable> {
    scenario.validate()?;
    let pointer = scenario.pointer()?;
    let grid = scenario.g_grid();
    let phis: Vec<Option<f64>> = if scenario.lock_phi {
        vec![None]
    } else {
        scenario.phis.iter().copied().map(Some).collect()
    };
    let mut rows = Vec::with_capacity(grid.len() * phis.len());
    for phi in phis {
        for &g in &grid {
            let (phi, g_mod) = match phi {
                Some(phi) => (phi, scenario.modulation_for(phi, scenario.g_true)?),
                None => {
                    let g_mod = scenario.modulation_for(0.0, scenario.g_true)?;
                    (2.0 * scenario.q0 * (g + g_mod), g_mod)
                }
            };
            let setup = PpsmSetup::optimal(pointer, CouplingConfig::new(g, g_mod), phi);
            rows.push(row(&setup, phi, scenario, kind)?);
        }
    }
    Ok(CurveTable { rows })
}

/// `phi` is recorded as requested, before wrapping into `[-π, π)`.
fn row(setup: &PpsmSetup, phi: f64, scenario: &Scenario, kind: CurveKind) -> Result<CurveRow> {
    let g = setup.coupling.g;
    let p_d = post_selection_probability(setup);
    let region = match region_bounds(setup, scenario.fraction, scenario.case) {
        Ok(r) if r.contains(g) => RegionFlag::Inside,
        _ => RegionFlag::Outside,
    };
    let value = match fisher_report(setup) {
        Ok(report) => {
            report.check_hierarchy()?;
            match kind {
                CurveKind::Shift => pointer_shift(setup)?,
                CurveKind::Sensitivity => sensitivity(setup)?,
                CurveKind::Cfi => report.cfi,
                CurveKind::Psel => p_d,
                CurveKind::Fd => report.fd_postselected,
            }
        }
        Err(ppsm_core::Error::ZeroPostSelection { .. }) => match kind {
            CurveKind::Psel => p_d,
            _ => f64::NAN,
        },
        Err(e) => return Err(e.into()),
    };
    Ok(CurveRow {
        g,
        phi,
        value,
        p_d,
        region,
    })
}
