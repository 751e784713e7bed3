use num_complex::Complex64;

use crate::littlewood_paley::{DyadicFilterBank, Q_MIN};
use crate::model::{magnetic_field, rescale, StateAB};
use crate::spectral::{lebesgue_norm_of, magnitude, ScalarField};
use crate::{Error, Result};

/// One compared quantity: shell (or low-pass level) `q` of the original
/// against `q + m` of the rescaled state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub q: i32,
    pub original: f64,
    pub rescaled: f64,
    /// `|original - rescaled| / max(original, rescaled)`; 0 when both vanish.
    pub rel_err: f64,
}

impl ScalingRow {
    fn new(q: i32, original: f64, rescaled: f64) -> Self {
        let scale = original.abs().max(rescaled.abs());
        let rel_err = if scale > 0.0 { (original - rescaled).abs() / scale } else { 0.0 };
        Self {
            q,
            original,
            rescaled,
            rel_err,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub m: u32,
    pub r: f64,
    /// `lambda_p^{2/r} ||B_p||_{L^r}` for `p >= 0`.
    pub shells: Vec<ScalingRow>,
    /// `||B_{<=q}||_{L^inf}` for `q >= -1`.
    pub lowpass: Vec<ScalingRow>,
    /// Largest relative error over rows whose quantities exceed
    /// `1e-12` of the largest one (smaller rows carry only round-off).
    pub max_rel_err: f64,
}

/// Compares the scale-invariant shell quantities of `state` with those of
/// its dyadic rescaling by `2^m`.
///
/// The rescaled field has period `L / 2^m`; its norms are taken over that
/// cell, sampled with the same `N^2` points as the original, which makes the
/// comparison exact up to round-off.
pub fn run_scaling_check(state: &StateAB, m: u32, r: f64, bank: &DyadicFilterBank) -> Result<ScalingReport> {
    if !(r >= 1.0) {
        return Err(Error::param("r", format!("must be >= 1, got {r}")));
    }
    if *state.grid() != *bank.grid() {
        return Err(Error::GridMismatch);
    }
    let scaled = rescale(state, m)?;
    let lambda = 2f64.powi(m as i32);
    let shift = m as i32;
    let b0 = magnetic_field(state);
    let b1 = magnetic_field(&scaled);
    let grid = bank.grid();

    let lr_on_cell = |parts: &[ScalarField]| -> (f64, f64) {
        let cell: Vec<ScalarField> = parts.iter().map(|p| restrict_to_cell(p, m)).collect();
        let mag = magnitude(&cell.iter().collect::<Vec<_>>());
        // the cell has area lambda^{-2} times the box
        let lr = lebesgue_norm_of(grid, &mag, r) * lambda.powf(-2.0 / r);
        let linf = mag.iter().fold(0.0, |acc: f64, v| acc.max(*v));
        (lr, linf)
    };
    let lr_on_box = |parts: &[ScalarField]| -> (f64, f64) {
        let mag = magnitude(&parts.iter().collect::<Vec<_>>());
        let linf = mag.iter().fold(0.0, |acc: f64, v| acc.max(*v));
        (lebesgue_norm_of(grid, &mag, r), linf)
    };

    let mut shells = Vec::new();
    for p in 0..=(bank.q_max() - shift) {
        let orig: Vec<ScalarField> = b0.components.iter().map(|c| bank.project(c, p)).collect::<Result<_>>()?;
        let resc: Vec<ScalarField> = b1
            .components
            .iter()
            .map(|c| bank.project(c, p + shift))
            .collect::<Result<_>>()?;
        let (lr0, _) = lr_on_box(&orig);
        let (lr1, _) = lr_on_cell(&resc);
        shells.push(ScalingRow::new(
            p,
            bank.lambda(p).powf(2.0 / r) * lr0,
            bank.lambda(p + shift).powf(2.0 / r) * lr1,
        ));
    }
    let mut lowpass = Vec::new();
    for q in Q_MIN..=(bank.q_max() - shift) {
        let orig: Vec<ScalarField> = b0.components.iter().map(|c| bank.lowpass(c, q)).collect();
        let resc: Vec<ScalarField> = b1.components.iter().map(|c| bank.lowpass(c, q + shift)).collect();
        lowpass.push(ScalingRow::new(q, lr_on_box(&orig).1, lr_on_cell(&resc).1));
    }

    let significant = |rows: &[ScalingRow]| -> f64 {
        let top = rows.iter().fold(0.0, |acc: f64, row| acc.max(row.original).max(row.rescaled));
        rows.iter()
            .filter(|row| row.original.max(row.rescaled) > 1e-12 * top)
            .map(|row| row.rel_err)
            .fold(0.0, f64::max)
    };
    let max_rel_err = significant(&shells).max(significant(&lowpass));
    Ok(ScalingReport {
        m,
        r,
        shells,
        lowpass,
        max_rel_err,
    })
}

/// Samples a field of period `L / 2^m` on its own cell: the coefficient of
/// `k` becomes the original coefficient of `2^m k`.
fn restrict_to_cell(field: &ScalarField, m: u32) -> ScalarField {
    let grid = field.grid();
    let half = grid.n() as i64 / 2;
    let factor = 1i64 << m;
    ScalarField::from_modes(grid, |k1, k2| {
        let (t1, t2) = (k1 * factor, k2 * factor);
        if t1.abs() < half && t2.abs() < half {
            field.coefficient(t1, t2)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}
