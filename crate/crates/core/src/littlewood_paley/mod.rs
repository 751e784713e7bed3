//! Dyadic (Littlewood-Paley) analysis on the lattice.
//!
//! The cutoff `chi` is radial, equal to 1 for `|xi| <= 3/4` and 0 for
//! `|xi| >= 1`. The ring multiplier is `phi(xi) = chi(xi/2) - chi(xi)`,
//! shell `q >= 0` uses `phi(|k| / 2^q)` on integer wavevectors and shell
//! `-1` uses `chi(|k|)`. The shell scale is `lambda_q = 2^q / L`.

mod bank;
mod bony;
mod commutator;
pub mod estimates;

pub use bank::{chi, phi, DyadicFilterBank, ShellEntry, ShellSpectrum, Q_MIN};
pub use bony::{bony_decompose, BonyParts};
pub use commutator::{commutator_curl, commutator_transport};
