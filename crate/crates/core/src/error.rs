use thiserror::Error;

use crate::estimation::AdaptiveTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pre- and post-selected states are orthogonal (|<f|i>| = {overlap:e}); weak value undefined")]
    OrthogonalSelection { overlap: f64 },

    #[error("post-selection probability {p_d:e} is below the floor; conditional density undefined")]
    ZeroPostSelection { p_d: f64 },

    #[error("approximation requested outside its validity region: {0}")]
    RegimeViolation(String),

    #[error("pointer is degenerate for the unbalanced case (|q0| = {q0:e}, sigma = {sigma:e})")]
    DegeneratePointer { q0: f64, sigma: f64 },

    #[error("measurement region is empty: {0}")]
    EmptyRegion(String),

    #[error("quadrature did not converge within {max_nodes} nodes (estimate {estimate:e}, error {error:e})")]
    NoConvergence {
        max_nodes: usize,
        estimate: f64,
        error: f64,
    },

    #[error("function is flat over the search interval [{lower}, {upper}]")]
    FlatFunction { lower: f64, upper: f64 },

    #[error("readout {q} has vanishing density at g = {g}")]
    ZeroDensity { q: f64, g: f64 },

    #[error("likelihood maximum {g_hat} lies at the edge of the search interval [{lower}, {upper}]")]
    BoundaryMaximum { g_hat: f64, lower: f64, upper: f64 },

    #[error("observed information is not positive at g = {g_hat} (value {information:e})")]
    NonPositiveInformation { g_hat: f64, information: f64 },

    #[error(
        "residual coupling lies {distance:e} outside the modulated region (threshold {threshold:e})"
    )]
    RegionMiss {
        distance: f64,
        threshold: f64,
        trace: Box<AdaptiveTrace>,
    },

    #[error("Fisher information hierarchy violated at g = {g}: cfi = {cfi}, fd = {fd}, max = {max}")]
    HierarchyViolation { g: f64, cfi: f64, fd: f64, max: f64 },

    #[error("no root of the shift equation in [{lower}, {upper}]")]
    NoRoot { lower: f64, upper: f64 },
}
