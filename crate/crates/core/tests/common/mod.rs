#![allow(dead_code)]

use num_complex::Complex64;

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// `E[q^m e^{ikq}]` for `q ~ N(mean, var)`, `m <= 2`.
pub fn gaussian_moment(m: u32, k: f64, mean: f64, var: f64) -> Complex64 {
    let cf = Complex64::new(0.0, k * mean).exp() * (-0.5 * k * k * var).exp();
    let d = Complex64::new(mean, k * var);
    match m {
        0 => cf,
        1 => d * cf,
        2 => (d * d + var) * cf,
        _ => unimplemented!(),
    }
}

/// Qubit amplitudes built directly from the Bloch angles.
pub fn ket(theta: f64, phi: f64) -> [Complex64; 2] {
    [
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ]
}

/// Normalised Gaussian pointer amplitude.
pub fn pointer(q: f64, q0: f64, sigma: f64) -> f64 {
    (std::f64::consts::PI * sigma * sigma).powf(-0.25) * (-(q - q0).powi(2) / (2.0 * sigma * sigma)).exp()
}

/// `<f| exp(i g' A q) |i> f(q)` with `A = diag(1, -1)`.
pub fn amplitude(pre: [Complex64; 2], post: [Complex64; 2], gp: f64, q: f64, q0: f64, sigma: f64) -> Complex64 {
    let up = post[0].conj() * pre[0] * Complex64::from_polar(1.0, gp * q);
    let down = post[1].conj() * pre[1] * Complex64::from_polar(1.0, -gp * q);
    (up + down) * pointer(q, q0, sigma)
}
