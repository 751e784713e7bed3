//! Seeded random fields.
//!
//! Draws iterate over a fixed wavevector window, independent of the grid
//! size, so the same seed yields the same function on every resolution that
//! can represent it.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::model::{energy_and_dissipation_spectral, StateAB};
use crate::spectral::{ScalarField, TorusGrid};
use crate::{Error, Result};

/// Largest `|k|` of the random initial data; keeps content in shells `q <= 2`.
pub const LOW_MODE_RADIUS: f64 = 6.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Zero-mean random field with coefficients drawn for `0 < max(|k1|,|k2|) <= window`
/// and kept where `keep(k1, k2)`, each scaled by `weight(k1, k2)`.
pub fn random_field(
    grid: &TorusGrid,
    rng: &mut impl Rng,
    window: i64,
    keep: impl Fn(i64, i64) -> bool,
    weight: impl Fn(i64, i64) -> f64,
) -> ScalarField {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    let cutoff = grid.cutoff();
    for k1 in 0..=window {
        for k2 in -window..=window {
            if k1 == 0 && k2 <= 0 {
                continue;
            }
            // draw unconditionally so the sequence does not depend on the grid
            let c = complex_normal(rng) * weight(k1, k2);
            if !keep(k1, k2) || k1.abs() > cutoff || k2.abs() > cutoff {
                continue;
            }
            coeffs[grid.index_of(k1, k2)] = c;
            coeffs[grid.index_of(-k1, -k2)] = c.conj();
        }
    }
    ScalarField::from_spectral(grid, coeffs).expect("finite random coefficients")
}

/// Smooth random field with algebraically decaying spectrum `(1 + |k|^2)^{-1}`
/// on `max(|k1|, |k2|) <= window`.
pub fn smooth_field(grid: &TorusGrid, rng: &mut impl Rng, window: i64) -> ScalarField {
    random_field(grid, rng, window, |_, _| true, |k1, k2| {
        1.0 / (1.0 + (k1 * k1 + k2 * k2) as f64)
    })
}

/// Unit-variance amplitudes on `0 < |k| <= 6` (shells `q <= 2`) for both
/// potentials, rescaled to total energy `energy`.
pub fn low_mode_state(grid: &TorusGrid, seed: u64, energy: f64, mu: f64) -> Result<StateAB> {
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::param("init.energy", format!("must be positive, got {energy}")));
    }
    let mut rng = rng(seed);
    let window = LOW_MODE_RADIUS as i64;
    let inside = |k1: i64, k2: i64| ((k1 * k1 + k2 * k2) as f64).sqrt() <= LOW_MODE_RADIUS;
    let a = random_field(grid, &mut rng, window, inside, |_, _| 1.0);
    let b = random_field(grid, &mut rng, window, inside, |_, _| 1.0);
    let raw = StateAB::new(a, b, 0.0, mu)?;
    let (e0, _) = energy_and_dissipation_spectral(&raw);
    Ok(raw.scaled((energy / e0).sqrt()))
}
