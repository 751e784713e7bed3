use crate::exec;
use crate::spectral::{ensure_physical_all, lebesgue_norm_of, magnitude, ScalarField, TorusGrid};
use crate::{Error, Result};

/// Index of the lowest shell.
pub const Q_MIN: i32 = -1;

/// Smooth radial cutoff: 1 on `|xi| <= 3/4`, 0 on `|xi| >= 1`.
///
/// The transition is `psi((1 - |xi|) / (1/4))` with
/// `psi(t) = g(t) / (g(t) + g(1 - t))`, `g(t) = exp(-1/t)` for `t > 0`.
pub fn chi(xi: f64) -> f64 {
    let r = xi.abs();
    if r <= 0.75 {
        1.0
    } else if r >= 1.0 {
        0.0
    } else {
        let t = (1.0 - r) / 0.25;
        let g = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
        let (a, b) = (g(t), g(1.0 - t));
        a / (a + b)
    }
}

/// Ring multiplier `chi(xi/2) - chi(xi)`, supported on `3/4 <= |xi| <= 2`.
pub fn phi(xi: f64) -> f64 {
    chi(xi / 2.0) - chi(xi)
}

/// Precomputed shell multipliers `phi_q(k)` for `q = -1, ..., q_max`.
///
/// `q_max` is the smallest shell index whose cumulative low-pass is
/// identically 1 on every dealiased mode (including the lattice corners at
/// `|k| = sqrt(2) floor(N/3)`), so the shells partition retained content.
#[derive(Debug, Clone)]
pub struct DyadicFilterBank {
    grid: TorusGrid,
    q_max: i32,
    shells: Vec<Vec<f64>>,
    lowpass: Vec<Vec<f64>>,
}

/// Norms of one Littlewood-Paley piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellEntry {
    pub q: i32,
    pub l2: f64,
    pub lr: f64,
    pub linf: f64,
}

/// Per-shell `L^2`, `L^r` and `L^inf` norms of a field.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellSpectrum {
    pub r: f64,
    pub source: String,
    pub entries: Vec<ShellEntry>,
}

impl ShellSpectrum {
    pub fn get(&self, q: i32) -> Option<&ShellEntry> {
        usize::try_from(q - Q_MIN).ok().and_then(|i| self.entries.get(i))
    }

    /// Shells carrying a non-negligible `L^2` share (`> tol * max`).
    pub fn populated(&self, tol: f64) -> Vec<i32> {
        let max = self.entries.iter().fold(0.0, |m: f64, e| m.max(e.l2));
        self.entries
            .iter()
            .filter(|e| max > 0.0 && e.l2 > tol * max)
            .map(|e| e.q)
            .collect()
    }
}

impl DyadicFilterBank {
    pub fn new(grid: &TorusGrid) -> Result<Self> {
        let cutoff = grid.cutoff();
        if cutoff < 1 {
            return Err(Error::InvalidGrid(
                "grid retains no non-constant mode; the q = -1 band cannot be resolved".into(),
            ));
        }
        let corner = std::f64::consts::SQRT_2 * cutoff as f64;
        let mut q_max = 0;
        while 0.75 * 2f64.powi(q_max + 1) < corner {
            q_max += 1;
        }

        let norms: Vec<f64> = (0..grid.len()).map(|i| grid.lattice_norm(i)).collect();
        let shells: Vec<Vec<f64>> = (Q_MIN..=q_max)
            .map(|q| {
                let mut t = vec![0.0; grid.len()];
                exec::fill_indexed(grid.exec(), &mut t, |i| shell_multiplier(q, norms[i]));
                t
            })
            .collect();
        let mut lowpass = Vec::with_capacity(shells.len());
        let mut acc = vec![0.0; grid.len()];
        for s in &shells {
            acc.iter_mut().zip(s).for_each(|(a, v)| *a += v);
            lowpass.push(acc.clone());
        }
        Ok(Self {
            grid: grid.clone(),
            q_max,
            shells,
            lowpass,
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    pub fn shell_indices(&self) -> std::ops::RangeInclusive<i32> {
        Q_MIN..=self.q_max
    }

    /// `lambda_q = 2^q / L`.
    pub fn lambda(&self, q: i32) -> f64 {
        2f64.powi(q) / self.grid.period()
    }

    fn check(&self, q: i32) -> Result<usize> {
        if q < Q_MIN || q > self.q_max {
            return Err(Error::ShellOutOfRange {
                q,
                q_max: self.q_max,
            });
        }
        Ok((q - Q_MIN) as usize)
    }

    /// Multiplier table `phi_q(k)`, indexed like the spectrum.
    pub fn multiplier(&self, q: i32) -> Result<&[f64]> {
        Ok(&self.shells[self.check(q)?])
    }

    /// Sum of `phi_q(k)` over all shells, for lattice index `idx`.
    pub fn partition_sum(&self, idx: usize) -> f64 {
        self.lowpass.last().unwrap()[idx]
    }

    /// `Delta_q u`.
    pub fn project(&self, u: &ScalarField, q: i32) -> Result<ScalarField> {
        self.same_grid(u)?;
        Ok(u.apply_real_multiplier(&self.shells[self.check(q)?]))
    }

    /// `u_{<=q}`; empty for `q < -1`, the full retained field for `q >= q_max`.
    pub fn lowpass(&self, u: &ScalarField, q: i32) -> ScalarField {
        if q < Q_MIN {
            return ScalarField::zeros(u.grid());
        }
        let i = ((q.min(self.q_max)) - Q_MIN) as usize;
        u.apply_real_multiplier(&self.lowpass[i])
    }

    /// `Delta_{q-1} u + Delta_q u + Delta_{q+1} u`, dropping out-of-range shells.
    pub fn tilde(&self, u: &ScalarField, q: i32) -> Result<ScalarField> {
        self.check(q)?;
        let mut table = vec![0.0; self.grid.len()];
        for p in (q - 1)..=(q + 1) {
            if let Ok(i) = self.check(p) {
                table.iter_mut().zip(&self.shells[i]).for_each(|(t, v)| *t += v);
            }
        }
        Ok(u.apply_real_multiplier(&table))
    }

    /// Every projection `Delta_q u`, `q = -1..=q_max`, with physical samples filled.
    pub fn decompose(&self, u: &ScalarField) -> Vec<ScalarField> {
        let parts: Vec<ScalarField> = self
            .shells
            .iter()
            .map(|t| u.apply_real_multiplier(t))
            .collect();
        ensure_physical_all(&parts.iter().collect::<Vec<_>>());
        parts
    }

    pub fn shell_spectrum(&self, u: &ScalarField, r: f64) -> Result<ShellSpectrum> {
        self.shell_spectrum_vector(&[u], r)
    }

    /// Shell norms of a vector field, using the pointwise Euclidean magnitude.
    pub fn shell_spectrum_vector(&self, components: &[&ScalarField], r: f64) -> Result<ShellSpectrum> {
        check_exponent(r)?;
        for c in components {
            self.same_grid(c)?;
        }
        let parts: Vec<Vec<ScalarField>> = components.iter().map(|c| self.decompose(c)).collect();
        let entries = exec::map_range(self.grid.exec(), self.shells.len(), |i| {
            let magnitude = magnitude(&parts.iter().map(|p| &p[i]).collect::<Vec<_>>());
            ShellEntry {
                q: i as i32 + Q_MIN,
                l2: lebesgue_norm_of(&self.grid, &magnitude, 2.0),
                lr: lebesgue_norm_of(&self.grid, &magnitude, r),
                linf: lebesgue_norm_of(&self.grid, &magnitude, f64::INFINITY),
            }
        });
        Ok(ShellSpectrum {
            r,
            source: format!("{}-component field", components.len()),
            entries,
        })
    }

    /// `(sum_q lambda_q^{2s} ||u_q||_{L^2}^2)^{1/2}` for `s` in `[-2, 4]`.
    pub fn sobolev_norm(&self, u: &ScalarField, s: f64) -> Result<f64> {
        self.sobolev_norm_vector(&[u], s)
    }

    pub fn sobolev_norm_vector(&self, components: &[&ScalarField], s: f64) -> Result<f64> {
        if !(-2.0..=4.0).contains(&s) {
            return Err(Error::param("s", format!("Sobolev exponent {s} outside [-2, 4]")));
        }
        let mut total = 0.0;
        for c in components {
            self.same_grid(c)?;
            // ||u_q||_{L^2} by Parseval on the multiplied coefficients.
            let spec = c.spectral();
            for (i, table) in self.shells.iter().enumerate() {
                let q = i as i32 + Q_MIN;
                let energy: f64 = spec
                    .iter()
                    .zip(table)
                    .map(|(z, m)| z.norm_sqr() * m * m)
                    .sum::<f64>()
                    * self.grid.area();
                total += self.lambda(q).powf(2.0 * s) * energy;
            }
        }
        Ok(total.sqrt())
    }

    /// `sup_q lambda_q ||u_q||_{L^inf}`.
    pub fn besov_b1inf_norm(&self, u: &ScalarField) -> f64 {
        self.decompose(u)
            .iter()
            .enumerate()
            .map(|(i, p)| self.lambda(i as i32 + Q_MIN) * p.max_abs())
            .fold(0.0, f64::max)
    }

    fn same_grid(&self, u: &ScalarField) -> Result<()> {
        if *u.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

fn shell_multiplier(q: i32, norm: f64) -> f64 {
    if q == Q_MIN {
        chi(norm)
    } else {
        phi(norm / 2f64.powi(q))
    }
}

fn check_exponent(r: f64) -> Result<()> {
    if r.is_nan() || r < 1.0 {
        return Err(Error::param("r", format!("L^r exponent must be >= 1, got {r}")));
    }
    Ok(())
}
