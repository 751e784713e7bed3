//! Periodic grid, transforms, spectral calculus and quadrature.

mod fft;
mod field;
mod grid;

pub use fft::Fft2d;
pub use field::{ensure_physical_all, ensure_physical_pair, magnitude, ScalarField};
pub use grid::{TorusGrid, MIN_POINTS};

pub(crate) use field::{from_samples_pair_dealiased, lebesgue_norm_of};
