//! Adaptive Gauss–Kronrod (10/21 point) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::sum::NeumaierSum;
use crate::error::{Error, Result};
use crate::tol;

// Kronrod abscissae on [0, 1); odd indices are the 10-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_600_525_361,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

const NODES_PER_PANEL: usize = 21;

/// Integration interval, panel count and stopping rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub lower: f64,
    pub upper: f64,
    pub max_nodes: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Number of equal panels evaluated before adaptive bisection starts.
    /// Oscillatory integrands need at least one panel per period.
    pub min_panels: usize,
}

impl QuadratureSpec {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self {
            lower,
            upper,
            max_nodes: tol::QUAD_MAX_NODES,
            abs_tol: tol::QUAD_ABS,
            rel_tol: tol::QUAD_REL,
            min_panels: tol::QUAD_MIN_PANELS,
        }
    }

    pub fn with_tolerance(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_panels(mut self, min_panels: usize) -> Self {
        self.min_panels = min_panels.max(1);
        self
    }

    pub fn with_max_nodes(mut self, max_nodes: usize) -> Self {
        self.max_nodes = max_nodes;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.lower.is_finite() && self.upper.is_finite() && self.lower < self.upper) {
            return Err(Error::InvalidParameter(format!(
                "quadrature bounds must satisfy lower < upper, got [{}, {}]",
                self.lower, self.upper
            )));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if self.max_nodes < NODES_PER_PANEL * self.min_panels.max(1) {
            return Err(Error::InvalidParameter(format!(
                "max_nodes {} cannot cover {} initial panels",
                self.max_nodes, self.min_panels
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    magnitude: f64,
    // error estimate is at the rounding floor; bisection cannot help
    saturated: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> (f64, bool) {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    let mut saturated = false;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let floor = 50.0 * f64::EPSILON * res_abs;
        if floor >= scaled {
            scaled = floor;
            saturated = true;
        }
    }
    (scaled, saturated || scaled == 0.0)
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let (error, saturated) = rescale_error(
        (res_k - res_g) * half,
        res_abs * half.abs(),
        res_asc * half.abs(),
    );
    Panel {
        a,
        b,
        value: res_k * half,
        error,
        magnitude: res_abs * half.abs(),
        saturated,
    }
}

/// Integrate `f` over `[spec.lower, spec.upper]`.
///
/// Starts from `spec.min_panels` equal panels and bisects the panel with the
/// largest error estimate until the total error is within
/// `max(abs_tol, rel_tol * |result|, 50 eps ∫|f|)`, or every remaining error is at the
/// rounding floor. Exhausting `max_nodes` first yields
/// [`Error::NoConvergence`].
pub fn integrate<F: Fn(f64) -> f64>(f: F, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    let panels = spec.min_panels.max(1);
    let width = (spec.upper - spec.lower) / panels as f64;
    let mut heap = BinaryHeap::with_capacity(panels * 2);
    for i in 0..panels {
        let a = spec.lower + width * i as f64;
        let b = if i + 1 == panels {
            spec.upper
        } else {
            spec.lower + width * (i + 1) as f64
        };
        heap.push(gauss_kronrod(&f, a, b));
    }
    let mut nodes = panels * NODES_PER_PANEL;

    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        let magnitude: f64 = heap.iter().map(|p| p.magnitude).sum();
        // cancelling integrands cannot beat rounding relative to ∫|f|
        let target = spec
            .abs_tol
            .max(spec.rel_tol * value.abs())
            .max(50.0 * f64::EPSILON * magnitude);
        if !value.is_finite() {
            return Err(Error::InvalidParameter(
                "integrand is not finite on the interval".into(),
            ));
        }
        let worst = *heap.peek().expect("at least one panel");
        if error <= target || worst.saturated || worst.b - worst.a <= 4.0 * f64::EPSILON * worst.a.abs().max(1.0) {
            break;
        }
        if nodes + 2 * NODES_PER_PANEL > spec.max_nodes {
            return Err(Error::NoConvergence {
                max_nodes: spec.max_nodes,
                estimate: value,
                error,
            });
        }
        heap.pop();
        let mid = 0.5 * (worst.a + worst.b);
        heap.push(gauss_kronrod(&f, worst.a, mid));
        heap.push(gauss_kronrod(&f, mid, worst.b));
        nodes += 2 * NODES_PER_PANEL;
    }

    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(panels.iter().map(|p| p.value).collect::<NeumaierSum>().value())
}
