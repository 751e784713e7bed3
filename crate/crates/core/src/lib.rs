//! Pseudo-spectral solver and dyadic diagnostics for 2.5D electron MHD on
//! the periodic box.
//!
//! The magnetic field is carried by two scalar potentials,
//! `B = (a_y, -a_x, b)`, evolved with an integrating-factor Runge-Kutta
//! scheme. On top of the solver sit Littlewood-Paley tools (shell
//! projections, Sobolev/Besov norms, paraproducts, commutators), the
//! dissipation-wavenumber reports, low-mode regularity monitors, and
//! experiment drivers (low-mode synchronization, radial cancellations,
//! energy audit, scaling check).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod experiments;
pub mod integrator;
pub mod io;
pub mod littlewood_paley;
pub mod model;
pub mod random;
pub mod spectral;
pub mod wavenumber;

pub use error::{Error, Result};
pub use exec::Exec;
pub use littlewood_paley::DyadicFilterBank;
pub use model::{StateAB, Variant, VectorField3};
pub use spectral::{ScalarField, TorusGrid};
