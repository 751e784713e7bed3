use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::fft::Fft2d;
use crate::exec::Exec;
use crate::{Error, Result};

pub const MIN_POINTS: usize = 16;

/// Periodic box `[0, L)^2` sampled on an `N x N` lattice.
///
/// Integer wavenumbers run over `{-N/2, ..., N/2 - 1}^2`; the physical
/// wavenumber of lattice vector `k` is `(2 pi / L) k`. Storage is row-major
/// with the x index outermost, in both physical and spectral space.
#[derive(Clone)]
pub struct TorusGrid {
    inner: Arc<GridInner>,
}

struct GridInner {
    n: usize,
    period: f64,
    fft: Fft2d,
    exec: Exec,
}

impl fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid")
            .field("n", &self.inner.n)
            .field("period", &self.inner.period)
            .finish()
    }
}

impl PartialEq for TorusGrid {
    fn eq(&self, other: &Self) -> bool {
        self.inner.n == other.inner.n && self.inner.period == other.inner.period
    }
}

impl TorusGrid {
    pub fn new(n: usize, period: f64) -> Result<Self> {
        Self::with_exec(n, period, Exec::default())
    }

    pub fn with_exec(n: usize, period: f64, exec: Exec) -> Result<Self> {
        if n < MIN_POINTS || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "points per dimension must be even and >= {MIN_POINTS}, got {n}"
            )));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "period must be positive and finite, got {period}"
            )));
        }
        Ok(Self {
            inner: Arc::new(GridInner {
                n,
                period,
                fft: Fft2d::new(n),
                exec,
            }),
        })
    }

    /// Unit-period grid.
    pub fn unit(n: usize) -> Result<Self> {
        Self::new(n, 1.0)
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn period(&self) -> f64 {
        self.inner.period
    }

    pub fn exec(&self) -> Exec {
        self.inner.exec
    }

    pub(crate) fn fft(&self) -> &Fft2d {
        &self.inner.fft
    }

    /// Number of lattice points, `N^2`.
    pub fn len(&self) -> usize {
        self.inner.n * self.inner.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest retained integer wavenumber per axis under the 2/3 rule.
    pub fn cutoff(&self) -> i64 {
        (self.inner.n / 3) as i64
    }

    /// Physical cell area `(L/N)^2`, the quadrature weight.
    pub fn cell_area(&self) -> f64 {
        let h = self.inner.period / self.inner.n as f64;
        h * h
    }

    pub fn area(&self) -> f64 {
        self.inner.period * self.inner.period
    }

    /// `2 pi / L`.
    pub fn base_wavenumber(&self) -> f64 {
        2.0 * PI / self.inner.period
    }

    /// Signed integer wavenumber of a storage index along one axis.
    #[inline]
    pub fn signed(&self, i: usize) -> i64 {
        let n = self.inner.n;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Integer wavenumber vector of a flat spectral index.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> (i64, i64) {
        let n = self.inner.n;
        (self.signed(idx / n), self.signed(idx % n))
    }

    /// Flat spectral index of an integer wavevector (taken modulo N).
    #[inline]
    pub fn index_of(&self, k1: i64, k2: i64) -> usize {
        let n = self.inner.n as i64;
        let i1 = k1.rem_euclid(n) as usize;
        let i2 = k2.rem_euclid(n) as usize;
        i1 * self.inner.n + i2
    }

    /// Flat index of `-k`.
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.inner.n;
        let (i1, i2) = (idx / n, idx % n);
        ((n - i1) % n) * n + (n - i2) % n
    }

    /// Euclidean norm `|k|` of the integer wavevector at `idx`.
    #[inline]
    pub fn lattice_norm(&self, idx: usize) -> f64 {
        let (k1, k2) = self.wavevector(idx);
        ((k1 * k1 + k2 * k2) as f64).sqrt()
    }

    /// Squared physical wavenumber `kappa^2 = (2 pi / L)^2 |k|^2`.
    #[inline]
    pub fn kappa_squared(&self, idx: usize) -> f64 {
        let (k1, k2) = self.wavevector(idx);
        let b = self.base_wavenumber();
        b * b * (k1 * k1 + k2 * k2) as f64
    }

    /// True when `max(|k1|, |k2|) <= cutoff`.
    #[inline]
    pub fn is_retained(&self, idx: usize) -> bool {
        let (k1, k2) = self.wavevector(idx);
        let c = self.cutoff();
        k1.abs() <= c && k2.abs() <= c
    }

    /// Largest physical wavenumber magnitude per axis that survives dealiasing.
    pub fn kappa_max(&self) -> f64 {
        self.base_wavenumber() * self.cutoff() as f64
    }

    /// Physical coordinates of the lattice point with flat index `idx`.
    #[inline]
    pub fn point(&self, idx: usize) -> (f64, f64) {
        let n = self.inner.n;
        let h = self.inner.period / n as f64;
        ((idx / n) as f64 * h, (idx % n) as f64 * h)
    }
}
