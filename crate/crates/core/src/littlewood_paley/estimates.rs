//! Empirical constants for the two commutator estimates.
//!
//! These only measure ratios of the left- and right-hand sides over random
//! ensembles; nothing is bounded a priori.

use super::bank::DyadicFilterBank;
use super::commutator::{commutator_curl, commutator_transport};
use crate::exec;
use crate::model::VectorField3;
use crate::random::{rng, smooth_field};
use crate::spectral::{ScalarField, TorusGrid};
use crate::Result;

/// Default wavevector window for ensemble draws; products of two such
/// fields stay below the dealias cutoff on a 64^2 grid.
pub const ENSEMBLE_WINDOW: i64 = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSummary {
    pub draws: usize,
    /// Ratios that entered the statistics (non-degenerate denominators).
    pub samples: usize,
    pub max: f64,
    pub mean: f64,
    pub all_finite: bool,
}

impl EnsembleSummary {
    fn from_per_draw(per_draw: Vec<Vec<f64>>) -> Self {
        let draws = per_draw.len();
        let all: Vec<f64> = per_draw.into_iter().flatten().collect();
        let all_finite = all.iter().all(|r| r.is_finite());
        let max = all.iter().copied().fold(0.0, f64::max);
        let mean = if all.is_empty() {
            0.0
        } else {
            all.iter().sum::<f64>() / all.len() as f64
        };
        Self {
            draws,
            samples: all.len(),
            max,
            mean,
            all_finite,
        }
    }
}

/// `||[Delta_q, u_{<=p-2}.grad] v_p||_{L^2} / (||grad u_{<=p-2}||_{L^inf} ||v_p||_{L^2})`,
/// or `None` when the denominator vanishes.
pub fn transport_ratio(
    u: (&ScalarField, &ScalarField),
    v: &ScalarField,
    q: i32,
    p: i32,
    bank: &DyadicFilterBank,
) -> Result<Option<f64>> {
    let comm = commutator_transport(u, v, q, p, bank)?;
    let ux = bank.lowpass(u.0, p - 2);
    let uy = bank.lowpass(u.1, p - 2);
    let grad_u = [ux.dx(), ux.dy(), uy.dx(), uy.dy()]
        .iter()
        .map(ScalarField::max_abs)
        .fold(0.0, f64::max);
    let denom = grad_u * bank.project(v, p)?.l2_norm();
    Ok(ratio(comm.l2_norm(), denom))
}

/// `|int [Delta_q, u x curl] v . curl w| / (||grad grad u||_{L^inf} ||v||_{L^2} ||w||_{L^2})`.
pub fn curl_ratio(
    u: &VectorField3,
    v: &VectorField3,
    w: &VectorField3,
    q: i32,
    bank: &DyadicFilterBank,
) -> Result<Option<f64>> {
    let comm = commutator_curl(u, v, q, bank)?;
    let pairing = comm.dot_integral(&w.curl()).abs();
    let hessian = u
        .components
        .iter()
        .flat_map(|c| {
            [
                c.derivative_unchecked(2, 0),
                c.derivative_unchecked(1, 1),
                c.derivative_unchecked(0, 2),
            ]
        })
        .map(|d| d.max_abs())
        .fold(0.0, f64::max);
    Ok(ratio(pairing, hessian * v.l2_norm() * w.l2_norm()))
}

/// Transport-commutator ratios over `draws` random triples `(ux, uy, v)`,
/// for `q = 0..=3` and every `p` with `|p - q| <= 2` and `p >= 1`.
pub fn transport_ensemble(grid: &TorusGrid, draws: usize, seed: u64, window: i64) -> Result<EnsembleSummary> {
    let bank = DyadicFilterBank::new(grid)?;
    let per_draw = exec::map_range(grid.exec(), draws, |i| -> Result<Vec<f64>> {
        let mut r = rng(seed.wrapping_add(i as u64));
        let ux = smooth_field(grid, &mut r, window);
        let uy = smooth_field(grid, &mut r, window);
        let v = smooth_field(grid, &mut r, window);
        let mut out = Vec::new();
        for q in 0..=3.min(bank.q_max()) {
            for p in (q - 2).max(1)..=(q + 2).min(bank.q_max()) {
                if let Some(x) = transport_ratio((&ux, &uy), &v, q, p, &bank)? {
                    out.push(x);
                }
            }
        }
        Ok(out)
    });
    Ok(EnsembleSummary::from_per_draw(per_draw.into_iter().collect::<Result<_>>()?))
}

/// Curl-commutator pairing ratios over `draws` random triples `(u, v, w)`, `q = -1..=3`.
pub fn curl_ensemble(grid: &TorusGrid, draws: usize, seed: u64, window: i64) -> Result<EnsembleSummary> {
    let bank = DyadicFilterBank::new(grid)?;
    let per_draw = exec::map_range(grid.exec(), draws, |i| -> Result<Vec<f64>> {
        let mut r = rng(seed.wrapping_add(i as u64));
        let mut vector = || {
            VectorField3::new(
                smooth_field(grid, &mut r, window),
                smooth_field(grid, &mut r, window),
                smooth_field(grid, &mut r, window),
            )
        };
        let (u, v, w) = (vector(), vector(), vector());
        let mut out = Vec::new();
        for q in -1..=3.min(bank.q_max()) {
            if let Some(x) = curl_ratio(&u, &v, &w, q, &bank)? {
                out.push(x);
            }
        }
        Ok(out)
    });
    Ok(EnsembleSummary::from_per_draw(per_draw.into_iter().collect::<Result<_>>()?))
}

fn ratio(num: f64, denom: f64) -> Option<f64> {
    (denom > f64::MIN_POSITIVE).then(|| num / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ensembles_are_finite() {
        let grid = TorusGrid::unit(32).unwrap();
        let t = transport_ensemble(&grid, 3, 1, 6).unwrap();
        assert!(t.all_finite && t.samples > 0 && t.max > 0.0);
        let c = curl_ensemble(&grid, 3, 1, 6).unwrap();
        assert!(c.all_finite && c.samples > 0 && c.max > 0.0);
    }
}
