/// Symmetric difference quotient `(f(x + h) - f(x - h)) / 2h`.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    debug_assert!(h > 0.0);
    (f(x + h) - f(x - h)) / (2.0 * h)
}
