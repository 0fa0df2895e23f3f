//! Shared numerical services.

mod diff;
mod quadrature;
mod rng;
mod search;
mod sum;

pub use diff::central_diff;
pub use quadrature::{integrate, QuadratureSpec};
pub use rng::RngStream;
pub use search::{argmax_1d, bisect_root, golden_section_max, Interval};
pub use sum::NeumaierSum;
