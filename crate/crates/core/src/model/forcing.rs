use num_complex::Complex64;

use crate::spectral::{ScalarField, TorusGrid};
use crate::{Error, Result};

/// One forcing mode `amplitude * cos(2 pi (k1 x + k2 y) / L + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForcingMode {
    pub k1: i64,
    pub k2: i64,
    pub amplitude: f64,
    pub phase: f64,
}

/// Time dependence shared by all modes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Modulation {
    #[default]
    Steady,
    /// Amplitudes multiplied by `sin(omega t)`.
    Sine { omega: f64 },
}

impl Modulation {
    pub fn factor(&self, t: f64) -> f64 {
        match *self {
            Modulation::Steady => 1.0,
            Modulation::Sine { omega } => (omega * t).sin(),
        }
    }
}

/// Forcing in potential form: `f_a` drives the `a` equation, `f_b` the `b` equation.
///
/// The forcing on the magnetic field is `(dy f_a, -dx f_a, f_b)`, which is
/// divergence-free by construction.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ForcingSpec {
    pub a_modes: Vec<ForcingMode>,
    pub b_modes: Vec<ForcingMode>,
    pub modulation: Modulation,
}

impl ForcingSpec {
    pub fn is_empty(&self) -> bool {
        self.a_modes.is_empty() && self.b_modes.is_empty()
    }

    /// Rejects modes the grid would remove by dealiasing.
    pub fn validate(&self, grid: &TorusGrid) -> Result<()> {
        let cutoff = grid.cutoff();
        for m in self.a_modes.iter().chain(&self.b_modes) {
            if m.k1.abs() > cutoff || m.k2.abs() > cutoff {
                return Err(Error::AboveCutoff {
                    k1: m.k1,
                    k2: m.k2,
                    cutoff,
                });
            }
            if !(m.amplitude.is_finite() && m.phase.is_finite()) {
                return Err(Error::param("forcing", "non-finite amplitude or phase"));
            }
        }
        if let Modulation::Sine { omega } = self.modulation {
            if !omega.is_finite() {
                return Err(Error::param("forcing.omega", "must be finite"));
            }
        }
        Ok(())
    }
}

/// Synthesizes `(f_a, f_b)` at time `t`.
pub fn forcing_eval(spec: &ForcingSpec, grid: &TorusGrid, t: f64) -> Result<(ScalarField, ScalarField)> {
    spec.validate(grid)?;
    let factor = spec.modulation.factor(t);
    Ok((
        synthesize(grid, &spec.a_modes, factor),
        synthesize(grid, &spec.b_modes, factor),
    ))
}

fn synthesize(grid: &TorusGrid, modes: &[ForcingMode], factor: f64) -> ScalarField {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    for m in modes {
        let amp = m.amplitude * factor;
        if m.k1 == 0 && m.k2 == 0 {
            coeffs[0] += amp * m.phase.cos();
            continue;
        }
        let c = Complex64::from_polar(0.5 * amp, m.phase);
        coeffs[grid.index_of(m.k1, m.k2)] += c;
        coeffs[grid.index_of(-m.k1, -m.k2)] += c.conj();
    }
    ScalarField::from_spectral(grid, coeffs).expect("finite forcing coefficients")
}
