use crate::error::{Error, Result};
use crate::tol;

/// Closed real interval `[lower, upper]` with `lower < upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(Error::InvalidParameter(format!(
                "interval must satisfy lower < upper, got [{lower}, {upper}]"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn centered(center: f64, half_width: f64) -> Result<Self> {
        Self::new(center - half_width, center + half_width)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    /// `n >= 2` equally spaced points including both ends.
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        let step = self.width() / (n - 1) as f64;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.upper
                } else {
                    self.lower + step * i as f64
                }
            })
            .collect()
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`,
/// stopping when the bracket is narrower than `tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        // bracket cannot shrink below the spacing of representable numbers
        if c >= d || b - a <= f64::EPSILON * (a.abs() + b.abs()) {
            break;
        }
    }
    if fc >= fd {
        c
    } else {
        d
    }
}

/// Maximise `f` over `interval`: scan `coarse_n` equally spaced points, then
/// refine around the best one by golden section to width `refine_tol`.
///
/// Non-finite values (including `-inf`) are ranked below every finite value.
/// Fails with [`Error::FlatFunction`] when the scan spread is below
/// `FLAT_REL` relative to the largest magnitude, or when no point is finite.
pub fn argmax_1d<F: Fn(f64) -> f64>(
    f: F,
    interval: Interval,
    coarse_n: usize,
    refine_tol: f64,
) -> Result<f64> {
    let xs = interval.linspace(coarse_n.max(3));
    let vals: Vec<f64> = xs.iter().map(|&x| rank(f(x))).collect();
    let (best, &vmax) = vals
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty scan");
    let vmin = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let flat = Error::FlatFunction {
        lower: interval.lower,
        upper: interval.upper,
    };
    if !vmax.is_finite() {
        return Err(flat);
    }
    if vmin.is_finite() {
        let scale = vmax.abs().max(vmin.abs()).max(f64::MIN_POSITIVE);
        if (vmax - vmin) <= tol::FLAT_REL * scale {
            return Err(flat);
        }
    }
    let lo = xs[best.saturating_sub(1)];
    let hi = xs[(best + 1).min(xs.len() - 1)];
    let x = golden_section_max(|x| rank(f(x)), lo, hi, refine_tol);
    // golden section never returns an endpoint; keep the scan point if it is better
    if rank(f(x)) >= vmax {
        Ok(x)
    } else {
        Ok(xs[best])
    }
}

fn rank(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Bisection for a sign change of `f` on `[a, b]`.
pub fn bisect_root<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::NoRoot {
            lower: a.min(b),
            upper: a.max(b),
        });
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
