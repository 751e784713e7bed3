use super::bank::{DyadicFilterBank, Q_MIN};
use crate::spectral::ScalarField;
use crate::{Error, Result};

/// The three paraproduct pieces of `Delta_q(u v)`.
#[derive(Debug, Clone)]
pub struct BonyParts {
    /// Low-high: `sum_{|p-q|<=2} Delta_q(u_{<=p-2} v_p)`.
    pub low_high: ScalarField,
    /// High-low: `sum_{|p-q|<=2} Delta_q(u_p v_{<=p-2})`.
    pub high_low: ScalarField,
    /// High-high: `sum_{p>=q-2} Delta_q(tilde u_p v_p)`.
    pub high_high: ScalarField,
}

impl BonyParts {
    pub fn sum(&self) -> ScalarField {
        &(&self.low_high + &self.high_low) + &self.high_high
    }
}

/// Splits `Delta_q(u v)` into paraproduct pieces with plain (dealiased)
/// pointwise products.
pub fn bony_decompose(
    u: &ScalarField,
    v: &ScalarField,
    q: i32,
    bank: &DyadicFilterBank,
) -> Result<BonyParts> {
    if u.grid() != v.grid() || u.grid() != bank.grid() {
        return Err(Error::GridMismatch);
    }
    bank.multiplier(q)?;
    let q_max = bank.q_max();
    let grid = bank.grid();
    let shells = |lo: i32, hi: i32| lo.max(Q_MIN)..=hi.min(q_max);

    let mut low_high = Vec::new();
    let mut high_low = Vec::new();
    for p in shells(q - 2, q + 2) {
        let u_low = bank.lowpass(u, p - 2);
        let v_low = bank.lowpass(v, p - 2);
        let u_p = bank.project(u, p)?;
        let v_p = bank.project(v, p)?;
        low_high.push(u_low.product(&v_p));
        high_low.push(u_p.product(&v_low));
    }
    let mut high_high = Vec::new();
    for p in shells(q - 2, q_max) {
        high_high.push(bank.tilde(u, p)?.product(&bank.project(v, p)?));
    }

    let collect = |terms: Vec<ScalarField>| -> Result<ScalarField> {
        let weighted: Vec<(f64, &ScalarField)> = terms.iter().map(|t| (1.0, t)).collect();
        bank.project(&ScalarField::linear_combination(grid, &weighted), q)
    };
    Ok(BonyParts {
        low_high: collect(low_high)?,
        high_low: collect(high_low)?,
        high_high: collect(high_high)?,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::spectral::TorusGrid;

    #[test]
    fn constant_multiplier_collapses() {
        let bank = DyadicFilterBank::new(&TorusGrid::unit(32).unwrap()).unwrap();
        let u = ScalarField::from_fn(bank.grid(), |x, y| (2.0 * PI * (2.0 * x + y)).sin() + 0.2)
            .unwrap();
        let one = ScalarField::constant(bank.grid(), 1.0);
        for q in bank.shell_indices() {
            let parts = bony_decompose(&u, &one, q, &bank).unwrap();
            let direct = bank.project(&u, q).unwrap();
            assert!(parts.sum().max_diff(&direct) < 1e-13);
            // v = 1 lives in shell -1, so it never acts as the high factor
            assert!(parts.low_high.max_abs() < 1e-14);
        }
    }

    #[test]
    fn cosine_square_matches_direct_projection() {
        let bank = DyadicFilterBank::new(&TorusGrid::unit(32).unwrap()).unwrap();
        let u = ScalarField::from_fn(bank.grid(), |x, _| (2.0 * PI * x).cos()).unwrap();
        let uu = u.product(&u);
        for q in bank.shell_indices() {
            let parts = bony_decompose(&u, &u, q, &bank).unwrap();
            let direct = bank.project(&uu, q).unwrap();
            assert!(parts.sum().max_diff(&direct) < 1e-14);
        }
    }
}
