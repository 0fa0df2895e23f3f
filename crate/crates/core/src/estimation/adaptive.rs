use std::f64::consts::FRAC_PI_4;
use std::fmt;

use crate::error::{Error, Result};
use crate::fisher::{optimal_modulation, region_bounds, sensitivity, RegionBounds};
use crate::numerics::{bisect_root, Interval, NeumaierSum, RngStream};
use crate::pps::pointer_shift;
use crate::state::{Case, CouplingConfig, GaussianPointer, PpsmSetup};
use crate::tol;

use super::likelihood::{log_likelihood, mle, EstimationReport};
use super::sampling::{sample_record, MeasurementRecord};

/// Black-box source of measurement records at a chosen post-selection angle
/// and modulation. The coupling itself stays hidden.
pub trait CouplingOracle {
    fn pointer(&self) -> GaussianPointer;

    fn measure(
        &self,
        phi: f64,
        modulation: f64,
        n_total: u64,
        rng: &mut RngStream,
    ) -> Result<MeasurementRecord>;
}

/// Oracle backed by [`sample_record`] at a fixed true coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulatedOracle {
    pub g_true: f64,
    pub pointer: GaussianPointer,
}

impl SimulatedOracle {
    pub fn new(g_true: f64, pointer: GaussianPointer) -> Self {
        Self { g_true, pointer }
    }
}

impl CouplingOracle for SimulatedOracle {
    fn pointer(&self) -> GaussianPointer {
        self.pointer
    }

    fn measure(
        &self,
        phi: f64,
        modulation: f64,
        n_total: u64,
        rng: &mut RngStream,
    ) -> Result<MeasurementRecord> {
        let setup = PpsmSetup::optimal(
            self.pointer,
            CouplingConfig::new(self.g_true, modulation),
            phi,
        );
        sample_record(&setup, n_total, rng)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Rough,
    Modulated,
    Final,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Rough => "rough",
            Stage::Modulated => "modulated",
            Stage::Final => "final",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageRecord {
    pub stage: Stage,
    pub phi: f64,
    pub modulation: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub trials: u64,
    pub n_success: usize,
}

/// Per-stage history of one protocol run, in execution order.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveTrace {
    pub stages: Vec<StageRecord>,
    pub split: BudgetSplit,
}

impl AdaptiveTrace {
    pub fn stage(&self, stage: Stage) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.stage == stage)
    }
}

/// Fractions of the trial budget spent on the three stages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetSplit {
    pub rough: f64,
    pub modulated: f64,
    pub last: f64,
}

impl Default for BudgetSplit {
    fn default() -> Self {
        Self {
            rough: 0.2,
            modulated: 0.1,
            last: 0.7,
        }
    }
}

impl BudgetSplit {
    fn validate(&self) -> Result<()> {
        let parts = [self.rough, self.modulated, self.last];
        if parts.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::InvalidParameter("budget fractions must be positive".into()));
        }
        if (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter("budget fractions must sum to 1".into()));
        }
        Ok(())
    }

    /// Trials per stage; the last stage takes the rounding remainder.
    pub fn allocate(&self, budget: u64) -> [u64; 3] {
        let n1 = (self.rough * budget as f64).round() as u64;
        let n2 = (self.modulated * budget as f64).round() as u64;
        [n1, n2, budget.saturating_sub(n1 + n2)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveConfig {
    pub case: Case,
    pub budget: u64,
    pub pointer: GaussianPointer,
    /// Post-selection angle of the modulated stages.
    pub phi_final: f64,
    /// Search interval for the rough estimate.
    pub prior: Interval,
    pub split: BudgetSplit,
    /// Region fraction passed to [`region_bounds`].
    pub fraction: f64,
    /// Post-selection angle of the rough stage.
    pub rough_angle: f64,
}

impl AdaptiveConfig {
    pub fn new(case: Case, budget: u64, pointer: GaussianPointer, phi_final: f64, prior: Interval) -> Self {
        Self {
            case,
            budget,
            pointer,
            phi_final,
            prior,
            split: BudgetSplit::default(),
            fraction: tol::DEFAULT_REGION_FRACTION,
            rough_angle: FRAC_PI_4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget < 3000 {
            return Err(Error::InvalidParameter(format!(
                "adaptive budget must be at least 3000 trials, got {}",
                self.budget
            )));
        }
        if !(self.phi_final > 0.0 && self.phi_final < FRAC_PI_4) {
            return Err(Error::InvalidParameter(format!(
                "final post-selection angle must lie in (0, pi/4), got {}",
                self.phi_final
            )));
        }
        if self.case == Case::Unbalanced && self.pointer.is_balanced() {
            return Err(Error::DegeneratePointer {
                q0: self.pointer.q0(),
                sigma: self.pointer.sigma(),
            });
        }
        self.split.validate()
    }

    /// Modulation of the rough stage: zero (balanced) or `φ/(8 q0)`.
    pub fn rough_modulation(&self) -> f64 {
        match self.case {
            Case::Balanced => 0.0,
            Case::Unbalanced => self.rough_angle / (8.0 * self.pointer.q0()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveOutcome {
    pub trace: AdaptiveTrace,
    /// Final-stage fit; `g_hat` is the combined estimate.
    pub report: EstimationReport,
    /// Modulated region of the final stage.
    pub region: RegionBounds,
}

/// Three-stage modulated estimation of the hidden coupling.
///
/// 1. Rough estimate `g0` at `rough_angle` with [`AdaptiveConfig::rough_modulation`].
/// 2. `g_M = optimal_modulation(g0)` at `phi_final`; fit in a window around `g0`.
/// 3. `g_M` re-centered on the stage-2 estimate; final fit.
///
/// Fails with [`Error::RegionMiss`] when the final estimate lies outside the
/// final modulated region by more than three stage-1 standard errors.
pub fn adaptive_protocol<O: CouplingOracle + ?Sized>(
    oracle: &O,
    config: &AdaptiveConfig,
    rng: &mut RngStream,
) -> Result<AdaptiveOutcome> {
    config.validate()?;
    let pointer = oracle.pointer();
    let [n1, n2, n3] = config.split.allocate(config.budget);
    let mut stages = Vec::with_capacity(3);

    let m1 = config.rough_modulation();
    let rough_template = PpsmSetup::optimal(pointer, CouplingConfig::new(0.0, m1), config.rough_angle);
    let rec1 = oracle.measure(config.rough_angle, m1, n1, rng)?;
    let (g0, se1) = match config.case {
        Case::Balanced => {
            let r = mle(&rec1, &rough_template, config.prior)?;
            (r.g_hat, r.stderr_hat)
        }
        Case::Unbalanced => invert_shift(&rec1, &rough_template, config.prior)?,
    };
    stages.push(StageRecord {
        stage: Stage::Rough,
        phi: config.rough_angle,
        modulation: m1,
        estimate: g0,
        stderr: se1,
        trials: n1,
        n_success: rec1.n_success(),
    });

    let (g2, se2, _) = modulated_fit(oracle, config, Stage::Modulated, g0, se1, n2, rng, &mut stages)?;
    let (g3, se3, (report, region)) =
        modulated_fit(oracle, config, Stage::Final, g2, se2, n3, rng, &mut stages)?;
    let trace = AdaptiveTrace {
        stages,
        split: config.split,
    };
    let distance = region.distance_outside(g3);
    let threshold = 3.0 * se1;
    if distance > threshold {
        return Err(Error::RegionMiss {
            distance,
            threshold,
            trace: Box::new(trace),
        });
    }
    debug_assert!(se3 > 0.0);
    Ok(AdaptiveOutcome {
        trace,
        report,
        region,
    })
}

#[allow(clippy::too_many_arguments)]
fn modulated_fit<O: CouplingOracle + ?Sized>(
    oracle: &O,
    config: &AdaptiveConfig,
    stage: Stage,
    center: f64,
    spread: f64,
    trials: u64,
    rng: &mut RngStream,
    stages: &mut Vec<StageRecord>,
) -> Result<(f64, f64, (EstimationReport, RegionBounds))> {
    let pointer = oracle.pointer();
    let phi = config.phi_final;
    let g_mod = optimal_modulation(center, &pointer, phi, config.case)?;
    let template = PpsmSetup::optimal(pointer, CouplingConfig::new(0.0, g_mod), phi);
    let region = region_bounds(&template, config.fraction, config.case)?;
    let window = Interval::centered(region.center_g, region.half_width() + 6.0 * spread)?;
    let record = oracle.measure(phi, g_mod, trials, rng)?;
    let report = mle(&record, &template, window)?;
    stages.push(StageRecord {
        stage,
        phi,
        modulation: g_mod,
        estimate: report.g_hat,
        stderr: report.stderr_hat,
        trials,
        n_success: record.n_success(),
    });
    Ok((report.g_hat, report.stderr_hat, (report, region)))
}

/// Solve `pointer_shift(g) = mean readout - q0` over `prior`. Among several
/// roots the one with the highest likelihood wins; without a sign change the
/// grid point of smallest residual is used. Standard error by the delta method.
fn invert_shift(record: &MeasurementRecord, template: &PpsmSetup, prior: Interval) -> Result<(f64, f64)> {
    let n = record.n_success();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "shift inversion needs at least two successful trials".into(),
        ));
    }
    let q0 = template.pointer.q0();
    let mean = record.mean().expect("nonempty record");
    let ss: NeumaierSum = record.successes.iter().map(|q| (q - mean).powi(2)).collect();
    let se_mean = (ss.value() / (n - 1) as f64 / n as f64).sqrt();
    let target = mean - q0;
    let residual = |g: f64| pointer_shift(&template.with_g(g)).map_or(f64::NAN, |s| s - target);

    let grid = prior.linspace(401);
    let values: Vec<f64> = grid.iter().map(|&g| residual(g)).collect();
    let tol = 1e-12 * prior.width();
    let mut roots = Vec::new();
    for i in 0..grid.len() - 1 {
        let (a, b) = (values[i], values[i + 1]);
        if a.is_finite() && b.is_finite() && (a == 0.0 || a.signum() != b.signum()) {
            if let Ok(r) = bisect_root(residual, grid[i], grid[i + 1], tol) {
                roots.push(r);
            }
        }
    }
    let g0 = if roots.is_empty() {
        grid.iter()
            .zip(&values)
            .filter(|(_, v)| v.is_finite())
            .min_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))
            .map(|(g, _)| *g)
            .ok_or(Error::NoRoot {
                lower: prior.lower,
                upper: prior.upper,
            })?
    } else {
        roots
            .iter()
            .copied()
            .max_by(|x, y| {
                let lx = log_likelihood(record, template, *x).unwrap_or(f64::NEG_INFINITY);
                let ly = log_likelihood(record, template, *y).unwrap_or(f64::NEG_INFINITY);
                lx.total_cmp(&ly)
            })
            .expect("nonempty roots")
    };
    let slope = sensitivity(&template.with_g(g0))?.abs();
    let se = if slope > 0.0 { se_mean / slope } else { prior.width() };
    Ok((g0, se.min(prior.width())))
}
