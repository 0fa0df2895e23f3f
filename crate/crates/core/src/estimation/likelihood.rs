use crate::error::{Error, Result};
use crate::fisher::cfi;
use crate::numerics::{argmax_1d, Interval, NeumaierSum};
use crate::pps::{post_selection_probability, Kernel};
use crate::state::PpsmSetup;
use crate::tol;

use super::sampling::MeasurementRecord;

/// Result of one maximum-likelihood fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimationReport {
    pub g_hat: f64,
    /// From the observed information at `g_hat`.
    pub stderr_hat: f64,
    pub n_total: u64,
    pub n_success: usize,
    /// `1 / (n_total · I(g_hat))` with `I` the per-trial classical information.
    pub fisher_bound: f64,
    /// `stderr_hat² / fisher_bound`.
    pub crb_ratio: f64,
}

/// Knobs for [`mle_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleOptions {
    pub coarse_points: usize,
    /// Golden-section bracket width relative to the search width.
    pub refine_rel: f64,
    /// Second-difference step relative to the search width.
    pub curvature_rel: f64,
    /// Edge band, relative to the width, that counts as a boundary maximum.
    pub edge_rel: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            coarse_points: 201,
            refine_rel: 1e-8,
            curvature_rel: 1e-3,
            edge_rel: 0.01,
        }
    }
}

/// Conditional log-likelihood `Σ ln P(q_i | g)` over the successful trials.
pub fn log_likelihood(record: &MeasurementRecord, template: &PpsmSetup, g: f64) -> Result<f64> {
    if record.successes.is_empty() {
        return Err(Error::InvalidParameter(
            "log-likelihood needs at least one successful trial".into(),
        ));
    }
    let setup = template.with_g(g);
    let p_d = post_selection_probability(&setup);
    if p_d <= tol::P_D_FLOOR {
        return Err(Error::ZeroPostSelection { p_d });
    }
    let kernel = Kernel::new(&setup);
    let q0 = setup.pointer.q0();
    let sigma = setup.pointer.sigma();
    // ln f(q)² = -z² - ln(√π σ)
    let offset = (std::f64::consts::PI.sqrt() * sigma).ln() + p_d.ln();
    let floor = tol::DENSITY_FLOOR.ln();
    let mut sum = NeumaierSum::new();
    for &q in &record.successes {
        let z = (q - q0) / sigma;
        let ln_p = kernel.modulation(q).ln() - z * z - offset;
        if ln_p.is_nan() || ln_p < floor {
            return Err(Error::ZeroDensity { q, g });
        }
        sum.add(ln_p);
    }
    Ok(sum.value())
}

pub fn mle(record: &MeasurementRecord, template: &PpsmSetup, search: Interval) -> Result<EstimationReport> {
    mle_with(record, template, search, MleOptions::default())
}

/// Maximise [`log_likelihood`] over `search`.
pub fn mle_with(
    record: &MeasurementRecord,
    template: &PpsmSetup,
    search: Interval,
    opts: MleOptions,
) -> Result<EstimationReport> {
    if record.successes.is_empty() {
        return Err(Error::InvalidParameter(
            "maximum likelihood needs at least one successful trial".into(),
        ));
    }
    let ll = |g: f64| log_likelihood(record, template, g).unwrap_or(f64::NEG_INFINITY);
    let width = search.width();
    let g_hat = argmax_1d(ll, search, opts.coarse_points, opts.refine_rel * width)?;
    let edge = opts.edge_rel * width;
    if g_hat - search.lower < edge || search.upper - g_hat < edge {
        return Err(Error::BoundaryMaximum {
            g_hat,
            lower: search.lower,
            upper: search.upper,
        });
    }
    let h = opts.curvature_rel * width;
    let information = -(ll(g_hat + h) - 2.0 * ll(g_hat) + ll(g_hat - h)) / (h * h);
    if !(information > 0.0 && information.is_finite()) {
        return Err(Error::NonPositiveInformation { g_hat, information });
    }
    let stderr_hat = information.sqrt().recip();
    let per_trial = cfi(&template.with_g(g_hat))?;
    let fisher_bound = 1.0 / (record.n_total as f64 * per_trial);
    Ok(EstimationReport {
        g_hat,
        stderr_hat,
        n_total: record.n_total,
        n_success: record.n_success(),
        fisher_bound,
        crb_ratio: stderr_hat * stderr_hat / fisher_bound,
    })
}
