//! Simulation and estimation toolkit for modulated pre- and post-selected
//! (PPS) measurements of a two-level system coupled to a Gaussian pointer.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: quadrature, differencing, 1-D search and seeded random streams.
//! - [`state`] and [`pps`]: states, couplings, post-selected amplitudes,
//!   probabilities, readout densities and pointer shifts.
//! - [`fisher`]: joint and post-selected quantum Fisher information, classical
//!   Fisher information, optimal modulation, sensitivity and region bounds.
//! - [`estimation`]: Monte Carlo records, maximum likelihood, Cramér–Rao studies
//!   and the three-stage adaptive modulation protocol.
//!
//! All quantities are dimensionless internally. A coupling `g` has inverse
//! pointer units, so `g * q` is a phase.

pub mod error;
pub mod estimation;
pub mod fisher;
pub mod numerics;
pub mod pps;
pub mod state;
pub mod tol;

pub use error::{Error, Result};
pub use state::{Case, CouplingConfig, GaussianPointer, PpsmSetup, QubitState};
