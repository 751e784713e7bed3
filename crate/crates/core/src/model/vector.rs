use std::ops::{Add, Sub};

use crate::spectral::{ensure_physical_all, lebesgue_norm_of, magnitude, ScalarField, TorusGrid};
use crate::Result;

/// Three scalar components on the planar grid, with no z-dependence.
#[derive(Debug, Clone)]
pub struct VectorField3 {
    pub components: [ScalarField; 3],
}

impl VectorField3 {
    pub fn new(c1: ScalarField, c2: ScalarField, c3: ScalarField) -> Self {
        assert!(c1.grid() == c2.grid() && c2.grid() == c3.grid(), "grid mismatch");
        Self {
            components: [c1, c2, c3],
        }
    }

    pub fn zeros(grid: &TorusGrid) -> Self {
        let z = ScalarField::zeros(grid);
        Self::new(z.clone(), z.clone(), z)
    }

    pub fn grid(&self) -> &TorusGrid {
        self.components[0].grid()
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        let [a, b, c] = &self.components;
        Self::new(f(a), f(b), f(c))
    }

    pub fn try_map(&self, f: impl Fn(&ScalarField) -> Result<ScalarField>) -> Result<Self> {
        let [a, b, c] = &self.components;
        Ok(Self::new(f(a)?, f(b)?, f(c)?))
    }

    /// Curl with `d/dz = 0`: `(dy v3, -dx v3, dx v2 - dy v1)`.
    pub fn curl(&self) -> Self {
        let [v1, v2, v3] = &self.components;
        Self::new(v3.dy(), -&v3.dx(), &v2.dx() - &v1.dy())
    }

    /// `dx v1 + dy v2`.
    pub fn divergence(&self) -> ScalarField {
        &self.components[0].dx() + &self.components[1].dy()
    }

    /// Pointwise cross product `self x other`, dealiased.
    pub fn cross(&self, other: &Self) -> Self {
        let [u1, u2, u3] = &self.components;
        let [w1, w2, w3] = &other.components;
        ensure_physical_all(&[u1, u2, u3, w1, w2, w3]);
        let (u1, u2, u3) = (u1.physical(), u2.physical(), u3.physical());
        let (w1, w2, w3) = (w1.physical(), w2.physical(), w3.physical());
        let n = u1.len();
        let mut c1 = vec![0.0; n];
        let mut c2 = vec![0.0; n];
        let mut c3 = vec![0.0; n];
        for i in 0..n {
            c1[i] = u2[i] * w3[i] - u3[i] * w2[i];
            c2[i] = u3[i] * w1[i] - u1[i] * w3[i];
            c3[i] = u1[i] * w2[i] - u2[i] * w1[i];
        }
        let grid = self.grid();
        let (a, b) = crate::spectral::from_samples_pair_dealiased(grid, c1, c2);
        Self::new(a, b, ScalarField::from_physical(grid, c3).unwrap().dealias())
    }

    /// `int self . other` over the torus.
    pub fn dot_integral(&self, other: &Self) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.inner(b))
            .sum()
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> Vec<f64> {
        let [a, b, c] = &self.components;
        magnitude(&[a, b, c])
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitude().into_iter().fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        lebesgue_norm_of(self.grid(), &self.magnitude(), 2.0)
    }

    pub fn lebesgue_norm(&self, r: f64) -> f64 {
        lebesgue_norm_of(self.grid(), &self.magnitude(), r)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|f| f.scale(c))
    }

    pub fn as_refs(&self) -> [&ScalarField; 3] {
        let [a, b, c] = &self.components;
        [a, b, c]
    }
}

impl Add for &VectorField3 {
    type Output = VectorField3;
    fn add(self, rhs: Self) -> VectorField3 {
        let [a, b, c] = &self.components;
        let [x, y, z] = &rhs.components;
        VectorField3::new(a + x, b + y, c + z)
    }
}

impl Sub for &VectorField3 {
    type Output = VectorField3;
    fn sub(self, rhs: Self) -> VectorField3 {
        let [a, b, c] = &self.components;
        let [x, y, z] = &rhs.components;
        VectorField3::new(a - x, b - y, c - z)
    }
}
