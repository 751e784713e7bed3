//! The 2.5D electron MHD system in potential form.
//!
//! With `B = (a_y, -a_x, b)` the evolved equations are
//!
//! ```text
//! a_t + (a_y b_x - a_x b_y)            = mu Lap a + f_a
//! b_t - (a_y Lap a_x - a_x Lap a_y)    = mu Lap b + f_b
//! ```
//!
//! The `Emhd2` variant drops the second bracket.

mod forcing;
mod vector;

use std::fmt;
use std::str::FromStr;

pub use forcing::{forcing_eval, ForcingMode, ForcingSpec, Modulation};
pub use vector::VectorField3;

use crate::spectral::{ensure_physical_all, from_samples_pair_dealiased, ScalarField, TorusGrid};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    #[default]
    Emhd1,
    Emhd2,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Emhd1 => "EMHD1",
            Variant::Emhd2 => "EMHD2",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "EMHD1" => Ok(Variant::Emhd1),
            "EMHD2" => Ok(Variant::Emhd2),
            other => Err(Error::param("variant", format!("expected EMHD1 or EMHD2, got `{other}`"))),
        }
    }
}

/// Solver state: potentials `a`, `b` at time `t` with resistivity `mu`.
#[derive(Debug, Clone)]
pub struct StateAB {
    pub a: ScalarField,
    pub b: ScalarField,
    pub t: f64,
    pub mu: f64,
}

impl StateAB {
    /// Builds a state, dealiasing both potentials.
    pub fn new(a: ScalarField, b: ScalarField, t: f64, mu: f64) -> Result<Self> {
        if a.grid() != b.grid() {
            return Err(Error::GridMismatch);
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::param("mu", format!("resistivity must be positive, got {mu}")));
        }
        if !t.is_finite() {
            return Err(Error::param("t", "time must be finite"));
        }
        Ok(Self {
            a: a.dealias(),
            b: b.dealias(),
            t,
            mu,
        })
    }

    pub fn zeros(grid: &TorusGrid, mu: f64) -> Result<Self> {
        Self::new(ScalarField::zeros(grid), ScalarField::zeros(grid), 0.0, mu)
    }

    pub fn grid(&self) -> &TorusGrid {
        self.a.grid()
    }

    /// Multiplies both potentials by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            a: self.a.scale(c),
            b: self.b.scale(c),
            ..self.clone()
        }
    }

    pub fn magnetic_field(&self) -> VectorField3 {
        magnetic_field(self)
    }

    /// True when every sample of both potentials is finite.
    pub fn is_finite(&self) -> bool {
        self.a
            .spectral()
            .iter()
            .chain(self.b.spectral())
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// `B = (a_y, -a_x, b)`.
pub fn magnetic_field(state: &StateAB) -> VectorField3 {
    VectorField3::new(state.a.dy(), -&state.a.dx(), state.b.clone())
}

/// `J1 = a_y b_x - a_x b_y`, dealiased.
pub fn jacobian_j1(a: &ScalarField, b: &ScalarField) -> ScalarField {
    let (ax, ay, bx, by) = (a.dx(), a.dy(), b.dx(), b.dy());
    ensure_physical_all(&[&ax, &ay, &bx, &by]);
    let samples = combine(&[ay.physical(), bx.physical(), ax.physical(), by.physical()], |v| {
        v[0] * v[1] - v[2] * v[3]
    });
    ScalarField::from_samples_dealiased(a.grid(), samples)
}

/// `J2 = a_y (Lap a)_x - a_x (Lap a)_y`, with the Laplacian applied before
/// the outer derivative.
pub fn hall_j2(a: &ScalarField) -> ScalarField {
    let lap = a.laplacian();
    let (ax, ay, lx, ly) = (a.dx(), a.dy(), lap.dx(), lap.dy());
    ensure_physical_all(&[&ax, &ay, &lx, &ly]);
    let samples = combine(&[ay.physical(), lx.physical(), ax.physical(), ly.physical()], |v| {
        v[0] * v[1] - v[2] * v[3]
    });
    ScalarField::from_samples_dealiased(a.grid(), samples)
}

/// Nonlinear right-hand sides `(N_a, N_b) = (-J1, J2)`; `N_b = 0` for `Emhd2`.
pub fn nonlinear_rhs(state: &StateAB, variant: Variant) -> (ScalarField, ScalarField) {
    let (a, b) = (&state.a, &state.b);
    let grid = a.grid();
    let (ax, ay, bx, by) = (a.dx(), a.dy(), b.dx(), b.dy());
    match variant {
        Variant::Emhd2 => {
            ensure_physical_all(&[&ax, &ay, &bx, &by]);
            let n_a = combine(&[ay.physical(), bx.physical(), ax.physical(), by.physical()], |v| {
                v[2] * v[3] - v[0] * v[1]
            });
            (ScalarField::from_samples_dealiased(grid, n_a), ScalarField::zeros(grid))
        }
        Variant::Emhd1 => {
            let lap = a.laplacian();
            let (lx, ly) = (lap.dx(), lap.dy());
            ensure_physical_all(&[&ax, &ay, &bx, &by, &lx, &ly]);
            let (ax, ay, bx, by, lx, ly) = (
                ax.physical(),
                ay.physical(),
                bx.physical(),
                by.physical(),
                lx.physical(),
                ly.physical(),
            );
            let n = ax.len();
            let mut n_a = vec![0.0; n];
            let mut n_b = vec![0.0; n];
            for i in 0..n {
                n_a[i] = ax[i] * by[i] - ay[i] * bx[i];
                n_b[i] = ay[i] * lx[i] - ax[i] * ly[i];
            }
            from_samples_pair_dealiased(grid, n_a, n_b)
        }
    }
}

/// `curl((curl B) x B)` for a z-independent field, all products dealiased.
pub fn hall_term_3d(field: &VectorField3) -> VectorField3 {
    field.curl().cross(field).curl()
}

/// Energy `E = 1/2 int (a_x^2 + a_y^2 + b^2)` and dissipation
/// `D = int (a_xx^2 + 2 a_xy^2 + a_yy^2 + b_x^2 + b_y^2)`, by lattice quadrature.
pub fn energy_and_dissipation(state: &StateAB) -> (f64, f64) {
    let a = &state.a;
    let b = &state.b;
    let (ax, ay, bx, by) = (a.dx(), a.dy(), b.dx(), b.dy());
    let (axx, axy, ayy) = (
        a.derivative_unchecked(2, 0),
        a.derivative_unchecked(1, 1),
        a.derivative_unchecked(0, 2),
    );
    let sq = |f: &ScalarField| f.inner(f);
    let energy = 0.5 * (sq(&ax) + sq(&ay) + sq(b));
    let dissipation = sq(&axx) + 2.0 * sq(&axy) + sq(&ayy) + sq(&bx) + sq(&by);
    (energy, dissipation)
}

/// `E` and `D` from the coefficients by Parseval (no transforms).
pub fn energy_and_dissipation_spectral(state: &StateAB) -> (f64, f64) {
    let grid = state.grid();
    let (sa, sb) = (state.a.spectral(), state.b.spectral());
    let mut e = 0.0;
    let mut d = 0.0;
    for i in 0..grid.len() {
        let k2 = grid.kappa_squared(i);
        let (na, nb) = (sa[i].norm_sqr(), sb[i].norm_sqr());
        e += k2 * na + nb;
        d += k2 * k2 * na + k2 * nb;
    }
    (0.5 * grid.area() * e, grid.area() * d)
}

/// Power input `int f . B = int (grad a . grad f_a + b f_b)` by Parseval.
pub fn forcing_work(state: &StateAB, f_a: &ScalarField, f_b: &ScalarField) -> f64 {
    let grid = state.grid();
    let (sa, sb) = (state.a.spectral(), state.b.spectral());
    let (fa, fb) = (f_a.spectral(), f_b.spectral());
    let mut w = 0.0;
    for i in 0..grid.len() {
        w += grid.kappa_squared(i) * (sa[i] * fa[i].conj()).re + (sb[i] * fb[i].conj()).re;
    }
    grid.area() * w
}

/// Dyadic rescaling with `lambda = 2^m`:
/// `a -> lambda^{-1} a(lambda x)`, `b -> b(lambda x)`, `t -> t / lambda^2`.
///
/// Mode `k` moves to `2^m k`; any source mode landing above the dealias
/// cutoff is rejected. Coefficients below `1e-14` of the largest one are
/// treated as round-off and dropped.
pub fn rescale(state: &StateAB, m: u32) -> Result<StateAB> {
    if m == 0 {
        return Ok(state.clone());
    }
    let lambda = 2f64.powi(m as i32);
    let factor = 1i64 << m;
    let grid = state.grid();
    let cutoff = grid.cutoff();
    let dilate = |f: &ScalarField, prefactor: f64| -> Result<ScalarField> {
        let src = f.spectral();
        let scale = src.iter().fold(0.0, |acc: f64, c| acc.max(c.norm()));
        let mut out = vec![num_complex::Complex64::new(0.0, 0.0); grid.len()];
        for (i, c) in src.iter().enumerate() {
            if c.norm() <= 1e-14 * scale {
                continue;
            }
            let (k1, k2) = grid.wavevector(i);
            let (t1, t2) = (k1 * factor, k2 * factor);
            if t1.abs() > cutoff || t2.abs() > cutoff {
                return Err(Error::AboveCutoff { k1, k2, cutoff });
            }
            out[grid.index_of(t1, t2)] = c * prefactor;
        }
        ScalarField::from_spectral(grid, out)
    };
    StateAB::new(
        dilate(&state.a, 1.0 / lambda)?,
        dilate(&state.b, 1.0)?,
        state.t / (lambda * lambda),
        state.mu,
    )
}

fn combine(inputs: &[&[f64]; 4], f: impl Fn([f64; 4]) -> f64) -> Vec<f64> {
    let n = inputs[0].len();
    (0..n)
        .map(|i| f([inputs[0][i], inputs[1][i], inputs[2][i], inputs[3][i]]))
        .collect()
}
