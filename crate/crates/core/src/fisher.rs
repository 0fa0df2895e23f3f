//! Quantum and classical Fisher information about the coupling `g`,
//! optimal modulation, sensitivity and measurement regions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{integrate, QuadratureSpec};
use crate::pps::{pointer_quadrature, Kernel};
use crate::state::{Case, CouplingConfig, GaussianPointer, PpsmSetup, QubitState};
use crate::tol;

/// Fisher quantities of one setup, all in inverse squared coupling units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherReport {
    pub at_g: f64,
    pub qfi_joint: f64,
    pub qfi_joint_max: f64,
    pub fd_postselected: f64,
    pub cfi: f64,
}

impl FisherReport {
    /// `cfi <= fd <= F^Q_max` up to `HIERARCHY_REL * F^Q_max`.
    pub fn hierarchy_holds(&self) -> bool {
        let slack = tol::HIERARCHY_REL * self.qfi_joint_max;
        self.cfi >= -slack
            && self.cfi <= self.fd_postselected + slack
            && self.fd_postselected <= self.qfi_joint_max + slack
    }

    pub fn check_hierarchy(&self) -> Result<()> {
        if self.hierarchy_holds() {
            Ok(())
        } else {
            Err(Error::HierarchyViolation {
                g: self.at_g,
                cfi: self.cfi,
                fd: self.fd_postselected,
                max: self.qfi_joint_max,
            })
        }
    }
}

pub fn fisher_report(setup: &PpsmSetup) -> Result<FisherReport> {
    Ok(FisherReport {
        at_g: setup.coupling.g,
        qfi_joint: qfi_joint(&setup.pre, &setup.pointer),
        qfi_joint_max: setup.pointer.max_information(),
        fd_postselected: qfi_postselected(setup)?,
        cfi: cfi(setup)?,
    })
}

/// QFI of the joint system–pointer state,
/// `4 q0² + 2σ² - 4 cos²(θi) q0²`. Independent of `g` and `g_M`.
pub fn qfi_joint(pre: &QubitState, pointer: &GaussianPointer) -> f64 {
    let q0 = pointer.q0();
    let c = pre.theta().cos();
    pointer.max_information() - 4.0 * c * c * q0 * q0
}

/// Joint QFI from `4(<∂Ψ|∂Ψ> - |<Ψ|∂Ψ>|²)` with both inner products
/// integrated over the two-component joint wavefunction.
pub fn qfi_joint_quadrature(
    pre: &QubitState,
    pointer: &GaussianPointer,
    coupling: &CouplingConfig,
) -> Result<f64> {
    let setup = PpsmSetup::new(*pre, *pre, *pointer, *coupling);
    let spec = information_quadrature(&setup);
    let [c0, c1] = pre.amplitudes();
    let gp = coupling.total();
    let components = |q: f64| -> ([Complex64; 2], [Complex64; 2]) {
        let f = pointer.amplitude(q);
        let up = c0 * Complex64::from_polar(f, gp * q);
        let down = c1 * Complex64::from_polar(f, -gp * q);
        let i = Complex64::i();
        ([up, down], [i * q * up, -i * q * down])
    };
    let norm_d = integrate(
        |q| {
            let (_, d) = components(q);
            d[0].norm_sqr() + d[1].norm_sqr()
        },
        &spec,
    )?;
    let cross = |q: f64| {
        let (s, d) = components(q);
        s[0].conj() * d[0] + s[1].conj() * d[1]
    };
    let cross_re = integrate(|q| cross(q).re, &spec)?;
    let cross_im = integrate(|q| cross(q).im, &spec)?;
    Ok(4.0 * (norm_d - (cross_re * cross_re + cross_im * cross_im)))
}

/// Absolute tolerance in units of `4 q0² + 2σ²`; inner products that
/// vanish analytically would otherwise chase rounding noise.
fn information_quadrature(setup: &PpsmSetup) -> QuadratureSpec {
    let spec = pointer_quadrature(setup);
    let scale = setup.pointer.max_information();
    let abs_tol = (tol::QUAD_REL * scale).max(spec.abs_tol);
    spec.with_tolerance(abs_tol, spec.rel_tol)
}

fn checked_kernel(setup: &PpsmSetup) -> Result<(Kernel, f64)> {
    let kernel = Kernel::new(setup);
    let p_d = kernel.probability();
    if p_d <= tol::P_D_FLOOR {
        return Err(Error::ZeroPostSelection { p_d });
    }
    Ok((kernel, p_d))
}

/// QFI retained by the successfully post-selected pointer,
/// `F_d = 4 p_d (<∂Φ|∂Φ> - |<Φ|∂Φ>|²)` with `Φ = ψ/ξ`, `ξ = sqrt(p_d)`.
///
/// Substituting `∂Φ = ∂ψ/ξ - ψ ξ'/ξ²` and `Re<ψ|∂ψ> = ξ ξ'`, every `ξ'` term
/// cancels and `F_d = 4(<∂ψ|∂ψ> - |<ψ|∂ψ>|² / p_d)`. The inner products of the
/// unnormalised amplitude are integrated numerically; `p_d` is the closed form.
/// Working with `ψ` rather than `Φ` keeps the integrands bounded as `p_d → 0`.
pub fn qfi_postselected(setup: &PpsmSetup) -> Result<f64> {
    let (kernel, p_d) = checked_kernel(setup)?;
    let (a, b, chi, gp) = (kernel.a, kernel.b, kernel.chi, kernel.gp);
    let pointer = setup.pointer;
    let spec = information_quadrature(setup);

    let fields = |q: f64| -> (Complex64, Complex64) {
        let f = pointer.amplitude(q);
        let up = Complex64::from_polar(a * f, gp * q);
        let down = Complex64::from_polar(b * f, chi - gp * q);
        (up + down, Complex64::i() * q * (up - down))
    };

    let norm_d = integrate(|q| fields(q).1.norm_sqr(), &spec)?;
    let cross_re = integrate(
        |q| {
            let (p, d) = fields(q);
            (p.conj() * d).re
        },
        &spec,
    )?;
    let cross_im = integrate(
        |q| {
            let (p, d) = fields(q);
            (p.conj() * d).im
        },
        &spec,
    )?;
    Ok(4.0 * (norm_d - (cross_re * cross_re + cross_im * cross_im) / p_d))
}

/// Classical Fisher information per input trial of a pointer readout after
/// successful post-selection, `I = p_d ∫ P (∂_g ln P)² dq`.
///
/// `∂_g P` is analytic. Writing `P = w/p_d` this is `∫ (∂w - w p'/p)² / w dq`;
/// for equal branch weights `w` has double zeros and the `cos²` factor is
/// cancelled analytically.
pub fn cfi(setup: &PpsmSetup) -> Result<f64> {
    let (kernel, p_d) = checked_kernel(setup)?;
    let log_rate = kernel.probability_derivative() / p_d;
    let pointer = setup.pointer;
    let (a, b) = (kernel.a, kernel.b);
    let balanced_weights = (a - b).abs() <= 1e-12 * (a + b);
    let integrand = |q: f64| -> f64 {
        let f2 = pointer.density(q);
        if balanced_weights {
            let (c, s) = kernel.half_phase(q);
            let t = 2.0 * q * s + c * log_rate;
            4.0 * a * b * f2 * t * t
        } else {
            let w = kernel.modulation(q) * f2;
            if w <= 0.0 {
                return 0.0;
            }
            let dw = kernel.modulation_derivative(q) * f2;
            let t = dw - w * log_rate;
            t * t / w
        }
    };
    integrate(integrand, &pointer_quadrature(setup))
}

/// Modulation that places the information peak on `g_nominal`:
/// balanced `g_M = -g`, unbalanced `g_M = φ/(2 q0) - g`.
pub fn optimal_modulation(
    g_nominal: f64,
    pointer: &GaussianPointer,
    phi: f64,
    case: Case,
) -> Result<f64> {
    match case {
        Case::Balanced => Ok(-g_nominal),
        Case::Unbalanced => {
            if pointer.is_balanced() {
                return Err(Error::DegeneratePointer {
                    q0: pointer.q0(),
                    sigma: pointer.sigma(),
                });
            }
            Ok(phi / (2.0 * pointer.q0()) - g_nominal)
        }
    }
}

/// Slope `d<q - q0>/dg` of the exact pointer shift.
pub fn sensitivity(setup: &PpsmSetup) -> Result<f64> {
    let (kernel, p_d) = checked_kernel(setup)?;
    let m = kernel.first_moment();
    let dm = kernel.first_moment_derivative();
    let dp = kernel.probability_derivative();
    Ok((dm * p_d - m * dp) / (p_d * p_d))
}

/// Coupling interval of the linear (balanced) or nonlinear intermediate
/// (unbalanced) region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionBounds {
    pub case: Case,
    pub center_g: f64,
    pub lower_g: f64,
    pub upper_g: f64,
    pub fraction: f64,
}

impl RegionBounds {
    pub fn contains(&self, g: f64) -> bool {
        self.lower_g <= g && g <= self.upper_g
    }

    /// Distance from `g` to the interval, zero inside.
    pub fn distance_outside(&self, g: f64) -> f64 {
        if g < self.lower_g {
            self.lower_g - g
        } else if g > self.upper_g {
            g - self.upper_g
        } else {
            0.0
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.upper_g - self.lower_g)
    }
}

/// Balanced: `|g' σ| <= fraction |φ|`. Unbalanced: `|g' q0 - φ/2| <=
/// fraction |g' σ|`, solved for `g'` with the sign of `φ/q0`.
pub fn region_bounds(setup: &PpsmSetup, fraction: f64, case: Case) -> Result<RegionBounds> {
    if !(fraction > 0.0 && fraction < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "region fraction must lie in (0, 1/2), got {fraction}"
        )));
    }
    let phi = setup.postselection_angle();
    let sigma = setup.pointer.sigma();
    let g_mod = setup.coupling.modulation;
    match case {
        Case::Balanced => {
            if phi == 0.0 {
                return Err(Error::EmptyRegion(
                    "balanced linear region has zero width at phi = 0".into(),
                ));
            }
            let half = fraction * phi.abs() / sigma;
            let center = -g_mod;
            Ok(RegionBounds {
                case,
                center_g: center,
                lower_g: center - half,
                upper_g: center + half,
                fraction,
            })
        }
        Case::Unbalanced => {
            let q0 = setup.pointer.q0();
            if q0.abs() <= fraction * sigma {
                return Err(Error::DegeneratePointer { q0, sigma });
            }
            if phi == 0.0 {
                return Err(Error::EmptyRegion(
                    "intermediate region needs a nonzero post-selection angle".into(),
                ));
            }
            let sign = (phi / q0).signum();
            let near = 0.5 * phi.abs() / (q0.abs() + fraction * sigma);
            let far = 0.5 * phi.abs() / (q0.abs() - fraction * sigma);
            let (x, y) = (sign * near - g_mod, sign * far - g_mod);
            Ok(RegionBounds {
                case,
                center_g: phi / (2.0 * q0) - g_mod,
                lower_g: x.min(y),
                upper_g: x.max(y),
                fraction,
            })
        }
    }
}
