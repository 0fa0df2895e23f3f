use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::numerics::RngStream;
use crate::pps::{pointer_pdf, Grid};
use crate::state::PpsmSetup;
use crate::tol;

/// Pointer readouts of the successful post-selections among `n_total` trials.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub successes: Vec<f64>,
    pub n_total: u64,
    pub seed: u64,
    pub stream_id: u64,
}

impl MeasurementRecord {
    pub fn n_success(&self) -> usize {
        self.successes.len()
    }

    pub fn success_fraction(&self) -> f64 {
        self.successes.len() as f64 / self.n_total as f64
    }

    pub fn mean(&self) -> Option<f64> {
        if self.successes.is_empty() {
            return None;
        }
        let s: crate::numerics::NeumaierSum = self.successes.iter().copied().collect();
        Some(s.value() / self.successes.len() as f64)
    }
}

/// Tabulated inverse CDF of a conditional readout density, linear between
/// `CDF_TABLE_POINTS` nodes spanning `q0 ± 12σ`.
#[derive(Debug, Clone)]
pub struct InverseCdf {
    lower: f64,
    step: f64,
    cdf: Vec<f64>,
}

impl InverseCdf {
    pub fn new(setup: &PpsmSetup) -> Result<Self> {
        let grid = Grid::for_setup(setup, tol::CDF_TABLE_POINTS);
        let pdf = pointer_pdf(setup, grid)?;
        let step = grid.step();
        let values = pdf.values();
        let mut cdf = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for w in values.windows(2) {
            acc += 0.5 * (w[0] + w[1]) * step;
            cdf.push(acc);
        }
        let total = acc;
        if total.is_nan() || total <= 0.0 {
            return Err(Error::ZeroPostSelection { p_d: pdf.p_d() });
        }
        for c in cdf.iter_mut() {
            *c /= total;
        }
        Ok(Self {
            lower: grid.lower,
            step,
            cdf,
        })
    }

    /// Readout with CDF value `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|&c| c <= u).clamp(1, self.cdf.len() - 1) - 1;
        let (c0, c1) = (self.cdf[i], self.cdf[i + 1]);
        let t = if c1 > c0 { ((u - c0) / (c1 - c0)).clamp(0.0, 1.0) } else { 0.5 };
        self.lower + self.step * (i as f64 + t)
    }
}

/// Simulate `n_total` trials. The success count is binomial with the
/// closed-form `p_d`; each success draws a readout from `P(q|g)` by inverse CDF.
pub fn sample_record(
    setup: &PpsmSetup,
    n_total: u64,
    rng: &mut RngStream,
) -> Result<MeasurementRecord> {
    if n_total == 0 {
        return Err(Error::InvalidParameter("n_total must be at least 1".into()));
    }
    let table = InverseCdf::new(setup)?;
    let p_d = crate::pps::post_selection_probability(setup).min(1.0);
    let n_success = Binomial::new(n_total, p_d)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?
        .sample(rng);
    let successes = (0..n_success)
        .map(|_| table.quantile(rng.random::<f64>()))
        .collect();
    Ok(MeasurementRecord {
        successes,
        n_total,
        seed: rng.seed(),
        stream_id: rng.stream_id(),
    })
}
