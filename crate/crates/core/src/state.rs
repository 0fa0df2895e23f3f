//! States, pointer and coupling configuration.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

/// Wrap an angle into `[-pi, pi)`.
pub fn normalize_angle(x: f64) -> f64 {
    let mut r = (x + PI).rem_euclid(TAU) - PI;
    if r >= PI {
        r -= TAU;
    }
    r
}

/// Pure qubit state `cos(theta/2)|0> + sin(theta/2) e^{i phi}|1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    theta: f64,
    phi: f64,
}

impl QubitState {
    /// `theta` must lie in `[0, pi]`; `phi` is wrapped into `[-pi, pi)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite()) {
            return Err(Error::InvalidParameter("state angles must be finite".into()));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "polar angle {theta} outside [0, pi]"
            )));
        }
        Ok(Self {
            theta,
            phi: normalize_angle(phi),
        })
    }

    pub fn zero() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn one() -> Self {
        Self { theta: PI, phi: 0.0 }
    }

    /// `(|0> + |1>)/sqrt(2)`, the pre-selection that maximises the joint QFI.
    pub fn plus() -> Self {
        Self {
            theta: FRAC_PI_2,
            phi: 0.0,
        }
    }

    /// `(e^{i angle/2}|0> - e^{-i angle/2}|1>)/sqrt(2)`, paired with [`plus`](Self::plus).
    ///
    /// Up to a global phase this is `(|0> + e^{i(pi - angle)}|1>)/sqrt(2)`, so
    /// the stored azimuth is `pi - angle`.
    pub fn optimal_postselection(angle: f64) -> Self {
        Self {
            theta: FRAC_PI_2,
            phi: normalize_angle(PI - angle),
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        let (s, c) = (0.5 * self.theta).sin_cos();
        [Complex64::new(c, 0.0), Complex64::from_polar(s, self.phi)]
    }

    /// `<self|other>`
    pub fn overlap(&self, other: &QubitState) -> Complex64 {
        let a = self.amplitudes();
        let b = other.amplitudes();
        a[0].conj() * b[0] + a[1].conj() * b[1]
    }
}

/// Gaussian pointer `f(q) = (pi sigma^2)^{-1/4} exp(-(q - q0)^2 / 2 sigma^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPointer {
    q0: f64,
    sigma: f64,
}

impl GaussianPointer {
    pub fn new(q0: f64, sigma: f64) -> Result<Self> {
        if !q0.is_finite() {
            return Err(Error::InvalidParameter("pointer center must be finite".into()));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "pointer width must be positive, got {sigma}"
            )));
        }
        Ok(Self { q0, sigma })
    }

    pub fn q0(&self) -> f64 {
        self.q0
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn amplitude(&self, q: f64) -> f64 {
        self.density(q).sqrt()
    }

    /// `f(q)^2`, a normal density with variance `sigma^2 / 2`.
    pub fn density(&self, q: f64) -> f64 {
        let z = (q - self.q0) / self.sigma;
        (-z * z).exp() / (PI.sqrt() * self.sigma)
    }

    /// Integration window `q0 ± 12 sigma`.
    pub fn window(&self) -> (f64, f64) {
        let half = tol::WINDOW_SIGMAS * self.sigma;
        (self.q0 - half, self.q0 + half)
    }

    pub fn is_balanced(&self) -> bool {
        self.q0.abs() < tol::DEGENERATE_POINTER * self.sigma
    }

    /// `4 <q^2>_0 = 4 q0^2 + 2 sigma^2`.
    pub fn max_information(&self) -> f64 {
        4.0 * self.q0 * self.q0 + 2.0 * self.sigma * self.sigma
    }
}

/// True coupling `g` and added modulation `g_M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConfig {
    pub g: f64,
    pub modulation: f64,
}

impl CouplingConfig {
    pub fn new(g: f64, modulation: f64) -> Self {
        Self { g, modulation }
    }

    pub fn unmodulated(g: f64) -> Self {
        Self { g, modulation: 0.0 }
    }

    /// `g' = g + g_M`
    pub fn total(&self) -> f64 {
        self.g + self.modulation
    }
}

/// Pointer scenario: centered (`q0 = 0`) or offset pointer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    Balanced,
    Unbalanced,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::Balanced => "balanced",
            Case::Unbalanced => "unbalanced",
        })
    }
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "balanced" => Ok(Case::Balanced),
            "unbalanced" => Ok(Case::Unbalanced),
            other => Err(Error::InvalidParameter(format!("unknown case '{other}'"))),
        }
    }
}

/// Complete measurement configuration. The observable is fixed to
/// `A = |0><0| - |1><1|` and the interaction to `H' = -(g + g_M) A ⊗ q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpsmSetup {
    pub pre: QubitState,
    pub post: QubitState,
    pub pointer: GaussianPointer,
    pub coupling: CouplingConfig,
}

impl PpsmSetup {
    pub fn new(
        pre: QubitState,
        post: QubitState,
        pointer: GaussianPointer,
        coupling: CouplingConfig,
    ) -> Self {
        Self {
            pre,
            post,
            pointer,
            coupling,
        }
    }

    /// Optimal pre/post-selection pair for post-selection angle `angle`.
    pub fn optimal(pointer: GaussianPointer, coupling: CouplingConfig, angle: f64) -> Self {
        Self::new(
            QubitState::plus(),
            QubitState::optimal_postselection(angle),
            pointer,
            coupling,
        )
    }

    pub fn with_g(mut self, g: f64) -> Self {
        self.coupling.g = g;
        self
    }

    pub fn with_modulation(mut self, modulation: f64) -> Self {
        self.coupling.modulation = modulation;
        self
    }

    /// `phi_i - phi_f`, wrapped into `[-pi, pi)`.
    pub fn phase_gap(&self) -> f64 {
        normalize_angle(self.pre.phi() - self.post.phi())
    }

    /// Post-selection angle `phi` in the convention of
    /// [`QubitState::optimal_postselection`]: `phase_gap + pi`, wrapped.
    pub fn postselection_angle(&self) -> f64 {
        normalize_angle(self.phase_gap() + PI)
    }

    pub fn total_coupling(&self) -> f64 {
        self.coupling.total()
    }

    /// Branch weights `(cos(θi/2)cos(θf/2), sin(θi/2)sin(θf/2))`, both >= 0.
    pub(crate) fn branch_weights(&self) -> (f64, f64) {
        let (si, ci) = (0.5 * self.pre.theta()).sin_cos();
        let (sf, cf) = (0.5 * self.post.theta()).sin_cos();
        (ci * cf, si * sf)
    }
}
