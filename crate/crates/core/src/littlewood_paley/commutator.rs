use super::bank::DyadicFilterBank;
use crate::model::VectorField3;
use crate::spectral::{ScalarField, TorusGrid};
use crate::{Error, Result};

/// `[Delta_q, u_{<=p-2} . grad] v_p
///   = Delta_q(u_{<=p-2} . grad v_p) - u_{<=p-2} . grad Delta_q v_p`
/// for a planar vector field `u = (ux, uy)` and scalar `v`.
pub fn commutator_transport(
    u: (&ScalarField, &ScalarField),
    v: &ScalarField,
    q: i32,
    p: i32,
    bank: &DyadicFilterBank,
) -> Result<ScalarField> {
    let grid = bank.grid();
    for f in [u.0, u.1, v] {
        if f.grid() != grid {
            return Err(Error::GridMismatch);
        }
    }
    bank.multiplier(q)?;
    let ux = bank.lowpass(u.0, p - 2);
    let uy = bank.lowpass(u.1, p - 2);
    let v_p = bank.project(v, p)?;
    let v_pq = bank.project(&v_p, q)?;

    let advect = |w: &ScalarField| -> ScalarField {
        let (wx, wy) = (w.dx(), w.dy());
        sum(grid, &[ux.product(&wx), uy.product(&wy)])
    };
    let outer = bank.project(&advect(&v_p), q)?;
    let inner = advect(&v_pq);
    Ok(&outer - &inner)
}

/// `[Delta_q, u x curl] v = Delta_q(u x (curl v)) - u x (curl Delta_q v)`
/// for z-independent three-component fields.
pub fn commutator_curl(
    u: &VectorField3,
    v: &VectorField3,
    q: i32,
    bank: &DyadicFilterBank,
) -> Result<VectorField3> {
    if u.grid() != bank.grid() || v.grid() != bank.grid() {
        return Err(Error::GridMismatch);
    }
    let full = u.cross(&v.curl()).try_map(|c| bank.project(c, q))?;
    let v_q = v.try_map(|c| bank.project(c, q))?;
    let local = u.cross(&v_q.curl());
    Ok(&full - &local)
}

fn sum(grid: &TorusGrid, terms: &[ScalarField]) -> ScalarField {
    let weighted: Vec<(f64, &ScalarField)> = terms.iter().map(|t| (1.0, t)).collect();
    ScalarField::linear_combination(grid, &weighted)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn setup() -> (DyadicFilterBank, ScalarField) {
        let grid = TorusGrid::unit(32).unwrap();
        let bank = DyadicFilterBank::new(&grid).unwrap();
        let v = ScalarField::from_fn(&grid, |x, y| {
            (2.0 * PI * (3.0 * x + y)).sin() + 0.5 * (2.0 * PI * (5.0 * y - 2.0 * x)).cos()
        })
        .unwrap();
        (bank, v)
    }

    #[test]
    fn constant_or_zero_transport_commutes() {
        let (bank, v) = setup();
        let g = bank.grid();
        let c1 = ScalarField::constant(g, 1.7);
        let c2 = ScalarField::constant(g, -0.4);
        let z = ScalarField::zeros(g);
        for q in 0..=3 {
            for p in (q - 2).max(-1)..=(q + 2).min(bank.q_max()) {
                let c = commutator_transport((&c1, &c2), &v, q, p, &bank).unwrap();
                assert!(c.max_abs() < 1e-12, "q={q} p={p}: {}", c.max_abs());
                let c = commutator_transport((&z, &z), &v, q, p, &bank).unwrap();
                assert!(c.max_abs() < 1e-13);
            }
        }
    }

    #[test]
    fn constant_or_curl_free_curl_commutator_vanishes() {
        let (bank, v) = setup();
        let g = bank.grid();
        let w = VectorField3::new(v.clone(), v.dx(), v.scale(0.5));
        let constant = VectorField3::new(
            ScalarField::constant(g, 0.3),
            ScalarField::constant(g, -1.1),
            ScalarField::constant(g, 2.0),
        );
        let zero = VectorField3::zeros(g);
        for q in -1..=3 {
            let c = commutator_curl(&constant, &w, q, &bank).unwrap();
            assert!(c.max_magnitude() < 1e-11, "q={q}: {}", c.max_magnitude());
            // packed transforms leak round-off from the partner field
            let c = commutator_curl(&zero, &w, q, &bank).unwrap();
            assert!(c.max_magnitude() < 1e-13);
            // planar gradient field: curl vanishes identically
            let grad = VectorField3::new(v.dx(), v.dy(), ScalarField::zeros(g));
            let c = commutator_curl(&w, &grad, q, &bank).unwrap();
            assert!(c.max_magnitude() < 1e-10);
        }
    }
}
