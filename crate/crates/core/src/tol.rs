//! Numerical thresholds shared across the crate.
//!
//! Values assume IEEE-754 double precision and at most ~1e5 quadrature nodes
//! per integral.

/// Post-selection probabilities at or below this are treated as zero.
pub const P_D_FLOOR: f64 = 1e-15;

/// `|<f|i>|` below this makes the weak value undefined.
pub const ORTHOGONAL_FLOOR: f64 = 1e-12;

/// Conditional densities below this make a readout incompatible with `g`.
pub const DENSITY_FLOOR: f64 = 1e-300;

/// Gaussian-weighted integrals are truncated at `q0 ± WINDOW_SIGMAS * sigma`.
/// The discarded mass of `f^2` is `erfc(12) < 1e-63`.
pub const WINDOW_SIGMAS: f64 = 12.0;

/// `|q0| < DEGENERATE_POINTER * sigma` counts as a balanced pointer.
pub const DEGENERATE_POINTER: f64 = 1e-12;

/// Relative slack for `cfi <= fd <= F^Q_max`.
pub const HIERARCHY_REL: f64 = 1e-6;

/// Relative spread below which a coarse scan is considered flat.
pub const FLAT_REL: f64 = 1e-14;

/// Absolute and relative targets used for pointer integrals.
pub const QUAD_ABS: f64 = 1e-15;
pub const QUAD_REL: f64 = 1e-13;

/// Node budget per integral.
pub const QUAD_MAX_NODES: usize = 100_000;

/// Minimum Gauss–Kronrod panels on a pointer window.
pub const QUAD_MIN_PANELS: usize = 8;

/// Grid points of the tabulated inverse CDF used for sampling.
pub const CDF_TABLE_POINTS: usize = 1 << 14;

/// Default half-width of linear / intermediate regions, as a fraction of the
/// post-selection angle (balanced) or of `|g' sigma|` (unbalanced).
pub const DEFAULT_REGION_FRACTION: f64 = 0.1;
