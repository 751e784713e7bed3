use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use super::grid::TorusGrid;
use crate::exec;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A real periodic scalar on a [`TorusGrid`].
///
/// Holds the physical samples and the Fourier coefficients, each computed
/// lazily from the other. The normalization is `u_hat(0) = mean(u)`.
/// Every spectral representation stored here is Hermitian-symmetrized.
#[derive(Clone)]
pub struct ScalarField {
    grid: TorusGrid,
    physical: OnceLock<Vec<f64>>,
    spectral: OnceLock<Vec<Complex64>>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("grid", &self.grid)
            .field("physical", &self.physical.get().is_some())
            .field("spectral", &self.spectral.get().is_some())
            .finish()
    }
}

impl ScalarField {
    pub fn zeros(grid: &TorusGrid) -> Self {
        Self::from_spectral_raw(grid, vec![ZERO; grid.len()])
    }

    pub fn constant(grid: &TorusGrid, value: f64) -> Self {
        let mut coeffs = vec![ZERO; grid.len()];
        coeffs[0] = Complex64::new(value, 0.0);
        Self::from_spectral_raw(grid, coeffs)
    }

    /// Wraps physical samples; rejects NaN and infinities.
    pub fn from_physical(grid: &TorusGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::param(
                "samples",
                format!("expected {} values, got {}", grid.len(), samples.len()),
            ));
        }
        check_finite(&samples)?;
        Ok(Self {
            grid: grid.clone(),
            physical: OnceLock::from(samples),
            spectral: OnceLock::new(),
        })
    }

    /// Samples `f(x, y)` on the lattice.
    pub fn from_fn(grid: &TorusGrid, f: impl Fn(f64, f64) -> f64 + Send + Sync) -> Result<Self> {
        let mut samples = vec![0.0; grid.len()];
        exec::fill_indexed(grid.exec(), &mut samples, |i| {
            let (x, y) = grid.point(i);
            f(x, y)
        });
        Self::from_physical(grid, samples)
    }

    /// Wraps Fourier coefficients, symmetrizing them so the field is real.
    pub fn from_spectral(grid: &TorusGrid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::param(
                "coefficients",
                format!("expected {} values, got {}", grid.len(), coeffs.len()),
            ));
        }
        if let Some((index, c)) = coeffs
            .iter()
            .enumerate()
            .find(|(_, c)| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::NonFinite {
                index,
                value: if c.re.is_finite() { c.im } else { c.re },
            });
        }
        Ok(Self::from_spectral_raw(grid, hermitian_part(grid, &coeffs)))
    }

    /// Caller guarantees the coefficients are already Hermitian.
    pub(crate) fn from_spectral_raw(grid: &TorusGrid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self {
            grid: grid.clone(),
            physical: OnceLock::new(),
            spectral: OnceLock::from(coeffs),
        }
    }

    /// Builds a field from a function of the integer wavevector.
    pub fn from_modes(grid: &TorusGrid, f: impl Fn(i64, i64) -> Complex64 + Send + Sync) -> Self {
        let mut coeffs = vec![ZERO; grid.len()];
        exec::fill_indexed(grid.exec(), &mut coeffs, |i| {
            let (k1, k2) = grid.wavevector(i);
            f(k1, k2)
        });
        Self::from_spectral_raw(grid, hermitian_part(grid, &coeffs))
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn physical(&self) -> &[f64] {
        self.physical.get_or_init(|| {
            let spec = self.spectral.get().expect("field has no representation");
            inverse_real(&self.grid, spec)
        })
    }

    pub fn spectral(&self) -> &[Complex64] {
        self.spectral.get_or_init(|| {
            let phys = self.physical.get().expect("field has no representation");
            forward_real(&self.grid, phys)
        })
    }

    pub fn into_spectral(self) -> Vec<Complex64> {
        self.spectral();
        self.spectral.into_inner().unwrap()
    }

    pub fn into_physical(self) -> Vec<f64> {
        self.physical();
        self.physical.into_inner().unwrap()
    }

    /// Fourier coefficient of integer wavevector `(k1, k2)`.
    pub fn coefficient(&self, k1: i64, k2: i64) -> Complex64 {
        self.spectral()[self.grid.index_of(k1, k2)]
    }

    /// Forward transform to coefficients, then back to fresh samples.
    pub fn transform_roundtrip(&self) -> Result<Self> {
        check_finite(self.physical())?;
        let coeffs = forward_real(&self.grid, self.physical());
        let samples = inverse_real(&self.grid, &coeffs);
        Self::from_physical(&self.grid, samples)
    }

    /// Applies a per-mode multiplier `m(k1, k2)` in spectral space.
    ///
    /// The multiplier must map Hermitian data to Hermitian data (even real
    /// multipliers, or odd imaginary ones); the result is re-symmetrized.
    pub fn map_modes(&self, m: impl Fn(i64, i64, Complex64) -> Complex64 + Send + Sync) -> Self {
        let src = self.spectral();
        let grid = &self.grid;
        let mut out = vec![ZERO; grid.len()];
        exec::fill_indexed(grid.exec(), &mut out, |i| {
            let (k1, k2) = grid.wavevector(i);
            m(k1, k2, src[i])
        });
        Self::from_spectral_raw(grid, hermitian_part(grid, &out))
    }

    /// Multiplies coefficients by a real even table indexed like the spectrum.
    pub fn apply_real_multiplier(&self, table: &[f64]) -> Self {
        assert_eq!(table.len(), self.grid.len());
        let src = self.spectral();
        let mut out = vec![ZERO; src.len()];
        exec::fill_indexed(self.grid.exec(), &mut out, |i| src[i] * table[i]);
        Self::from_spectral_raw(&self.grid, out)
    }

    /// Spectral partial derivative `d^m1/dx^m1 d^m2/dy^m2` with `m1 + m2 <= 4`.
    pub fn derivative(&self, m1: u32, m2: u32) -> Result<Self> {
        if m1 + m2 > 4 {
            return Err(Error::param(
                "multi_index",
                format!("order {} exceeds 4", m1 + m2),
            ));
        }
        if m1 == 0 && m2 == 0 {
            return Ok(self.clone());
        }
        Ok(self.derivative_unchecked(m1, m2))
    }

    pub(crate) fn derivative_unchecked(&self, m1: u32, m2: u32) -> Self {
        let n = self.grid.n() as i64;
        let base = self.grid.base_wavenumber();
        self.map_modes(move |k1, k2, c| {
            // The Nyquist row/column has no conjugate partner for odd orders.
            if (m1 % 2 == 1 && k1 == -n / 2) || (m2 % 2 == 1 && k2 == -n / 2) {
                return ZERO;
            }
            c * ik_pow(base * k1 as f64, m1) * ik_pow(base * k2 as f64, m2)
        })
    }

    pub fn dx(&self) -> Self {
        self.derivative_unchecked(1, 0)
    }

    pub fn dy(&self) -> Self {
        self.derivative_unchecked(0, 1)
    }

    pub fn laplacian(&self) -> Self {
        let grid = &self.grid;
        let src = self.spectral();
        let mut out = vec![ZERO; src.len()];
        exec::fill_indexed(grid.exec(), &mut out, |i| -src[i] * grid.kappa_squared(i));
        Self::from_spectral_raw(grid, out)
    }

    /// Zeroes every coefficient with `max(|k1|, |k2|) > floor(N/3)`.
    pub fn dealias(&self) -> Self {
        let grid = &self.grid;
        let src = self.spectral();
        let mut out = vec![ZERO; src.len()];
        exec::fill_indexed(grid.exec(), &mut out, |i| {
            if grid.is_retained(i) {
                src[i]
            } else {
                ZERO
            }
        });
        Self::from_spectral_raw(grid, out)
    }

    pub fn is_dealiased(&self) -> bool {
        let spec = self.spectral();
        (0..spec.len()).all(|i| self.grid.is_retained(i) || spec[i] == ZERO)
    }

    /// Uniform-grid quadrature `((L^2/N^2) sum |u|^r)^(1/r)`; `r = inf` is the lattice max.
    pub fn lebesgue_norm(&self, r: f64) -> Result<f64> {
        if r.is_nan() || r < 1.0 {
            return Err(Error::param("r", format!("L^r exponent must be >= 1, got {r}")));
        }
        Ok(lebesgue_norm_of(&self.grid, self.physical(), r))
    }

    pub fn l2_norm(&self) -> f64 {
        lebesgue_norm_of(&self.grid, self.physical(), 2.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.physical().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(L^2 sum_k |u_hat(k)|^2)^(1/2)`.
    pub fn parseval_l2(&self) -> f64 {
        (self.grid.area() * self.spectral().iter().map(|c| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// `int u v` over the torus, evaluated on the lattice.
    pub fn inner(&self, other: &Self) -> f64 {
        let (u, v) = (self.physical(), other.physical());
        self.grid.cell_area() * u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn mean(&self) -> f64 {
        self.spectral()[0].re
    }

    pub fn scale(&self, c: f64) -> Self {
        if let Some(spec) = self.spectral.get() {
            Self::from_spectral_raw(&self.grid, spec.iter().map(|v| v * c).collect())
        } else {
            let phys: Vec<f64> = self.physical().iter().map(|v| v * c).collect();
            Self {
                grid: self.grid.clone(),
                physical: OnceLock::from(phys),
                spectral: OnceLock::new(),
            }
        }
    }

    /// `sum_i c_i f_i` in spectral space.
    pub fn linear_combination(grid: &TorusGrid, terms: &[(f64, &ScalarField)]) -> Self {
        let mut out = vec![ZERO; grid.len()];
        for (c, f) in terms {
            assert!(f.grid == *grid, "grid mismatch in linear combination");
            for (o, v) in out.iter_mut().zip(f.spectral()) {
                *o += v * *c;
            }
        }
        Self::from_spectral_raw(grid, out)
    }

    /// Pointwise product computed on the lattice, then dealiased.
    pub fn product(&self, other: &Self) -> Self {
        assert!(self.grid == other.grid, "grid mismatch in product");
        let (u, v) = ensure_physical_pair(self, other);
        let samples: Vec<f64> = u.iter().zip(v).map(|(a, b)| a * b).collect();
        Self {
            grid: self.grid.clone(),
            physical: OnceLock::from(samples),
            spectral: OnceLock::new(),
        }
        .dealias()
    }

    /// Builds a field from a pointwise combination of already-computed sample
    /// vectors, then dealiases it.
    pub(crate) fn from_samples_dealiased(grid: &TorusGrid, samples: Vec<f64>) -> Self {
        Self {
            grid: grid.clone(),
            physical: OnceLock::from(samples),
            spectral: OnceLock::new(),
        }
        .dealias()
    }

    /// Largest deviation from Hermitian symmetry, `max |u(-k) - conj(u(k))|`.
    pub fn hermitian_defect(&self) -> f64 {
        let spec = self.spectral();
        (0..spec.len())
            .map(|i| (spec[self.grid.conjugate_index(i)] - spec[i].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Max-norm difference of physical samples.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.physical()
            .iter()
            .zip(other.physical())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Makes sure both fields have physical samples, sharing one complex FFT
/// when both are missing.
pub fn ensure_physical_pair<'a>(u: &'a ScalarField, v: &'a ScalarField) -> (&'a [f64], &'a [f64]) {
    if u.physical.get().is_none() && v.physical.get().is_none() && u.grid == v.grid {
        let (pu, pv) = inverse_pair(&u.grid, u.spectral(), v.spectral());
        let _ = u.physical.set(pu);
        let _ = v.physical.set(pv);
    }
    (u.physical(), v.physical())
}

/// Fills physical samples for every field in the slice, two per FFT.
pub fn ensure_physical_all(fields: &[&ScalarField]) {
    let missing: Vec<&ScalarField> = fields
        .iter()
        .copied()
        .filter(|f| f.physical.get().is_none())
        .collect();
    for pair in missing.chunks(2) {
        match pair {
            [u, v] => {
                ensure_physical_pair(u, v);
            }
            [u] => {
                u.physical();
            }
            _ => unreachable!(),
        }
    }
}

/// Pointwise Euclidean magnitude of a list of fields.
pub fn magnitude(components: &[&ScalarField]) -> Vec<f64> {
    ensure_physical_all(components);
    let n = components.first().map(|c| c.grid().len()).unwrap_or(0);
    if components.len() == 1 {
        return components[0].physical().iter().map(|v| v.abs()).collect();
    }
    let mut out = vec![0.0; n];
    for c in components {
        out.iter_mut()
            .zip(c.physical())
            .for_each(|(o, v)| *o += v * v);
    }
    out.iter_mut().for_each(|o| *o = o.sqrt());
    out
}

/// Dealiased fields from two sample vectors, sharing one forward FFT.
pub(crate) fn from_samples_pair_dealiased(
    grid: &TorusGrid,
    u: Vec<f64>,
    v: Vec<f64>,
) -> (ScalarField, ScalarField) {
    let (cu, cv) = forward_pair(grid, &u, &v);
    let dealias = |c: Vec<Complex64>| {
        let mut c = c;
        for (i, z) in c.iter_mut().enumerate() {
            if !grid.is_retained(i) {
                *z = ZERO;
            }
        }
        ScalarField::from_spectral_raw(grid, c)
    };
    (dealias(cu), dealias(cv))
}

fn ik_pow(k: f64, m: u32) -> Complex64 {
    match m % 4 {
        _ if m == 0 => Complex64::new(1.0, 0.0),
        0 => Complex64::new(k.powi(m as i32), 0.0),
        1 => Complex64::new(0.0, k.powi(m as i32)),
        2 => Complex64::new(-k.powi(m as i32), 0.0),
        _ => Complex64::new(0.0, -k.powi(m as i32)),
    }
}

fn check_finite(samples: &[f64]) -> Result<()> {
    match samples.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            index,
            value: samples[index],
        }),
        None => Ok(()),
    }
}

pub(crate) fn lebesgue_norm_of(grid: &TorusGrid, samples: &[f64], r: f64) -> f64 {
    if r.is_infinite() {
        return samples.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let w = grid.cell_area();
    if r == 2.0 {
        return (w * samples.iter().map(|v| v * v).sum::<f64>()).sqrt();
    }
    if r == 1.0 {
        return w * samples.iter().map(|v| v.abs()).sum::<f64>();
    }
    (w * samples.iter().map(|v| v.abs().powf(r)).sum::<f64>()).powf(1.0 / r)
}

/// `(c(k) + conj(c(-k))) / 2` for every mode.
pub(crate) fn hermitian_part(grid: &TorusGrid, coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; coeffs.len()];
    exec::fill_indexed(grid.exec(), &mut out, |i| {
        let j = grid.conjugate_index(i);
        (coeffs[i] + coeffs[j].conj()) * 0.5
    });
    out
}

fn forward_real(grid: &TorusGrid, samples: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    grid.fft().forward(grid.exec(), &mut buf);
    let norm = 1.0 / grid.len() as f64;
    buf.iter_mut().for_each(|c| *c *= norm);
    hermitian_part(grid, &buf)
}

fn inverse_real(grid: &TorusGrid, coeffs: &[Complex64]) -> Vec<f64> {
    let mut buf = coeffs.to_vec();
    grid.fft().inverse(grid.exec(), &mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// Two real inverse transforms for the price of one: `ifft(u + i v) = u + i v`.
fn inverse_pair(grid: &TorusGrid, u: &[Complex64], v: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    let i = Complex64::new(0.0, 1.0);
    let mut buf: Vec<Complex64> = u.iter().zip(v).map(|(a, b)| a + i * b).collect();
    grid.fft().inverse(grid.exec(), &mut buf);
    buf.into_iter().map(|c| (c.re, c.im)).unzip()
}

/// Two real forward transforms packed into one complex transform.
fn forward_pair(grid: &TorusGrid, u: &[f64], v: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut buf: Vec<Complex64> = u.iter().zip(v).map(|(&a, &b)| Complex64::new(a, b)).collect();
    grid.fft().forward(grid.exec(), &mut buf);
    let norm = 1.0 / grid.len() as f64;
    let mut cu = vec![ZERO; buf.len()];
    let mut cv = vec![ZERO; buf.len()];
    for idx in 0..buf.len() {
        let z = buf[idx];
        let zc = buf[grid.conjugate_index(idx)].conj();
        cu[idx] = (z + zc) * (0.5 * norm);
        // (z - zc) / (2i)
        let d = (z - zc) * (0.5 * norm);
        cv[idx] = Complex64::new(d.im, -d.re);
    }
    (cu, cv)
}

impl Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: Self) -> ScalarField {
        ScalarField::linear_combination(&self.grid, &[(1.0, self), (1.0, rhs)])
    }
}

impl Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: Self) -> ScalarField {
        ScalarField::linear_combination(&self.grid, &[(1.0, self), (-1.0, rhs)])
    }
}

impl Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: f64) -> ScalarField {
        self.scale(rhs)
    }
}
