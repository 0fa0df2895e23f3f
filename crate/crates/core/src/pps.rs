//! Post-selected amplitudes, probabilities, readout densities and pointer
//! shifts.
//!
//! With branch weights `a = cos(θi/2)cos(θf/2)`, `b = sin(θi/2)sin(θf/2)`,
//! phase gap `χ = φi - φf` and total coupling `g'`, the unnormalised
//! post-selected pointer amplitude is
//!
//! ```text
//! ψ(q) = [a e^{i g' q} + b e^{iχ} e^{-i g' q}] f(q)
//! ```
//!
//! and every closed form below follows from Gaussian moments of `f(q)^2`,
//! which is normal with mean `q0` and variance `σ^2/2`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{integrate, QuadratureSpec};
use crate::state::{Case, PpsmSetup, QubitState};
use crate::tol;

/// `<f|A|i> / <f|i>` with `A = |0><0| - |1><1|`.
pub fn weak_value(pre: &QubitState, post: &QubitState) -> Result<Complex64> {
    let i = pre.amplitudes();
    let f = post.amplitudes();
    let overlap = f[0].conj() * i[0] + f[1].conj() * i[1];
    if overlap.norm() < tol::ORTHOGONAL_FLOOR {
        return Err(Error::OrthogonalSelection {
            overlap: overlap.norm(),
        });
    }
    let numerator = f[0].conj() * i[0] - f[1].conj() * i[1];
    Ok(numerator / overlap)
}

/// Scalars shared by the closed forms for one setup.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Kernel {
    pub a: f64,
    pub b: f64,
    pub chi: f64,
    pub gp: f64,
    pub q0: f64,
    pub sigma: f64,
    /// `exp(-σ² g'²)`
    pub damping: f64,
    /// `2 q0 g' - χ`
    pub carrier: f64,
}

impl Kernel {
    pub fn new(setup: &PpsmSetup) -> Self {
        let (a, b) = setup.branch_weights();
        let chi = setup.phase_gap();
        let gp = setup.total_coupling();
        let q0 = setup.pointer.q0();
        let sigma = setup.pointer.sigma();
        Self {
            a,
            b,
            chi,
            gp,
            q0,
            sigma,
            damping: (-(sigma * gp).powi(2)).exp(),
            carrier: 2.0 * q0 * gp - chi,
        }
    }

    /// `p_d = (a-b)² + 2ab[(1 - E) + 2E cos²(c/2)]`, free of cancellation
    /// when `p_d` is small.
    pub fn probability(&self) -> f64 {
        let one_minus_e = -(-(self.sigma * self.gp).powi(2)).exp_m1();
        let half = (0.5 * self.carrier).cos();
        (self.a - self.b).powi(2)
            + 2.0 * self.a * self.b * (one_minus_e + 2.0 * self.damping * half * half)
    }

    /// `d p_d / d g`
    pub fn probability_derivative(&self) -> f64 {
        let (s, c) = self.carrier.sin_cos();
        2.0 * self.a
            * self.b
            * self.damping
            * (-2.0 * self.sigma * self.sigma * self.gp * c - 2.0 * self.q0 * s)
    }

    /// `∫ (q - q0) |ψ|² dq = -2ab g' σ² E sin c`
    pub fn first_moment(&self) -> f64 {
        -2.0 * self.a * self.b * self.gp * self.sigma * self.sigma * self.damping * self.carrier.sin()
    }

    /// `d/dg` of [`first_moment`](Self::first_moment).
    pub fn first_moment_derivative(&self) -> f64 {
        let s2 = self.sigma * self.sigma;
        let (s, c) = self.carrier.sin_cos();
        let d = self.damping * (s * (1.0 - 2.0 * s2 * self.gp * self.gp) + 2.0 * self.q0 * self.gp * c);
        -2.0 * self.a * self.b * s2 * d
    }

    /// `cos((2g'q - χ)/2)` and `sin((2g'q - χ)/2)`.
    pub fn half_phase(&self, q: f64) -> (f64, f64) {
        let (s, c) = (self.gp * q - 0.5 * self.chi).sin_cos();
        (c, s)
    }

    /// `|ψ(q)|² / f(q)² = (a-b)² + 4ab cos²((2g'q - χ)/2)`
    pub fn modulation(&self, q: f64) -> f64 {
        let (c, _) = self.half_phase(q);
        (self.a - self.b).powi(2) + 4.0 * self.a * self.b * c * c
    }

    /// `∂_g` of [`modulation`](Self::modulation).
    pub fn modulation_derivative(&self, q: f64) -> f64 {
        let (c, s) = self.half_phase(q);
        -8.0 * self.a * self.b * q * s * c
    }
}

/// Unnormalised `<q|<ψ_f|Ψ'>`, i.e. the post-selected amplitude times `f(q)`.
pub fn post_selected_amplitude(setup: &PpsmSetup, q: f64) -> Complex64 {
    let (a, b) = setup.branch_weights();
    let gp = setup.total_coupling();
    let chi = setup.phase_gap();
    let f = setup.pointer.amplitude(q);
    (Complex64::from_polar(a, gp * q) + Complex64::from_polar(b, chi - gp * q)) * f
}

/// `|post_selected_amplitude|²`, evaluated in a cancellation-free form.
pub fn unnormalized_density(setup: &PpsmSetup, q: f64) -> f64 {
    Kernel::new(setup).modulation(q) * setup.pointer.density(q)
}

/// Closed-form post-selection probability. For the optimal pair this is
/// `[1 - e^{-σ²g'²} cos(2 q0 g' - φ)] / 2`.
pub fn post_selection_probability(setup: &PpsmSetup) -> f64 {
    Kernel::new(setup).probability()
}

/// `d p_d / d g`.
pub fn post_selection_probability_derivative(setup: &PpsmSetup) -> f64 {
    Kernel::new(setup).probability_derivative()
}

/// Panels needed to put at least one Gauss–Kronrod panel (21 nodes) on every
/// period `π/|g'|` of the integrand across the `24σ` window.
pub fn pointer_quadrature(setup: &PpsmSetup) -> QuadratureSpec {
    let (lo, hi) = setup.pointer.window();
    let gp = setup.total_coupling().abs();
    let periods = ((hi - lo) * gp / std::f64::consts::PI).ceil();
    let panels = if periods.is_finite() {
        (periods as usize).max(tol::QUAD_MIN_PANELS)
    } else {
        tol::QUAD_MIN_PANELS
    };
    QuadratureSpec::new(lo, hi)
        .with_panels(panels)
        .with_max_nodes(tol::QUAD_MAX_NODES.max(panels * 21 * 4))
}

/// `∫ |post_selected_amplitude|² dq` by quadrature of the complex amplitude.
pub fn post_selection_probability_quadrature(setup: &PpsmSetup) -> Result<f64> {
    integrate(
        |q| post_selected_amplitude(setup, q).norm_sqr(),
        &pointer_quadrature(setup),
    )
}

fn checked_probability(setup: &PpsmSetup) -> Result<f64> {
    let p_d = post_selection_probability(setup);
    if p_d <= tol::P_D_FLOOR {
        return Err(Error::ZeroPostSelection { p_d });
    }
    Ok(p_d)
}

/// Uniform tabulation grid for a readout density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lower: f64,
    pub upper: f64,
    pub nodes: usize,
}

impl Grid {
    /// The pointer window `q0 ± 12σ` with `nodes` points.
    pub fn for_setup(setup: &PpsmSetup, nodes: usize) -> Self {
        let (lower, upper) = setup.pointer.window();
        Self {
            lower,
            upper,
            nodes: nodes.max(2),
        }
    }

    pub fn step(&self) -> f64 {
        (self.upper - self.lower) / (self.nodes - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.nodes {
            self.upper
        } else {
            self.lower + self.step() * i as f64
        }
    }
}

/// Conditional readout density `P(q|g) = |ψ(q)|² / p_d`.
#[derive(Debug, Clone)]
pub struct PointerDistribution {
    setup: PpsmSetup,
    kernel: Kernel,
    p_d: f64,
    grid: Grid,
    values: Vec<f64>,
}

impl PointerDistribution {
    pub fn p_d(&self) -> f64 {
        self.p_d
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn setup(&self) -> &PpsmSetup {
        &self.setup
    }

    /// Density tabulated at the grid points.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn density(&self, q: f64) -> f64 {
        self.kernel.modulation(q) * self.setup.pointer.density(q) / self.p_d
    }

    /// `∫ P(q|g) dq` by adaptive quadrature.
    pub fn normalization(&self) -> Result<f64> {
        integrate(|q| self.density(q), &pointer_quadrature(&self.setup))
    }

    /// `∫ (q - q0) P(q|g) dq` by adaptive quadrature.
    pub fn centered_mean(&self) -> Result<f64> {
        let q0 = self.setup.pointer.q0();
        integrate(|q| (q - q0) * self.density(q), &pointer_quadrature(&self.setup))
    }
}

/// Tabulate the conditional readout density on `grid`.
pub fn pointer_pdf(setup: &PpsmSetup, grid: Grid) -> Result<PointerDistribution> {
    let p_d = checked_probability(setup)?;
    let kernel = Kernel::new(setup);
    let values = (0..grid.nodes)
        .map(|i| {
            let q = grid.point(i);
            kernel.modulation(q) * setup.pointer.density(q) / p_d
        })
        .collect();
    Ok(PointerDistribution {
        setup: *setup,
        kernel,
        p_d,
        grid,
        values,
    })
}

/// Exact shift of the mean readout, `<q>_post - q0`.
///
/// For the optimal pair this is
/// `σ² g' e^{-σ²g'²} sin(2q0g' - φ) / [1 - e^{-σ²g'²} cos(2q0g' - φ)]`.
pub fn pointer_shift(setup: &PpsmSetup) -> Result<f64> {
    let p_d = checked_probability(setup)?;
    Ok(Kernel::new(setup).first_moment() / p_d)
}

/// Linear-response approximations of [`pointer_shift`].
///
/// - balanced: `-σ² g' Im(A_w)`, valid for `|g'σ| < |φ|/2`;
/// - unbalanced: `(2 q0 g' - φ) / g'`, requires `g' != 0`.
pub fn linearized_shift(setup: &PpsmSetup, case: Case) -> Result<f64> {
    let gp = setup.total_coupling();
    let sigma = setup.pointer.sigma();
    let phi = setup.postselection_angle();
    match case {
        Case::Balanced => {
            if (gp * sigma).abs() >= 0.5 * phi.abs() {
                return Err(Error::RegimeViolation(format!(
                    "balanced linearisation needs |g' sigma| < |phi|/2 (g' sigma = {}, phi = {phi})",
                    gp * sigma
                )));
            }
            let aw = weak_value(&setup.pre, &setup.post)?;
            Ok(-sigma * sigma * gp * aw.im)
        }
        Case::Unbalanced => {
            if gp == 0.0 {
                return Err(Error::RegimeViolation(
                    "unbalanced linearisation needs g' != 0".into(),
                ));
            }
            Ok((2.0 * setup.pointer.q0() * gp - phi) / gp)
        }
    }
}
