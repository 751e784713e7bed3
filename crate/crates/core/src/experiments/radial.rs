use crate::integrator::{integrate, RunSettings, Sample, StepPolicy};
use crate::model::{hall_j2, hall_term_3d, magnetic_field, StateAB, Variant};
use crate::spectral::{ScalarField, TorusGrid};
use crate::{Error, Result};

/// Largest tolerated periodization error of the Gaussian bumps.
pub const PERIODIZATION_LIMIT: f64 = 1e-15;

#[derive(Debug, Clone)]
pub struct RadialConfig {
    pub grid: TorusGrid,
    /// Width of `exp(-|x - c|^2 / sigma^2)`, centered in the box.
    pub sigma: f64,
    pub amplitude_a: f64,
    pub amplitude_b: f64,
    /// Resistivity and duration of the radial EMHD1 run.
    pub mu: f64,
    pub t_run: f64,
    pub policy: StepPolicy,
    /// Heat check: EMHD2 with `a = 0`, `b = cos(2 pi y / L)`.
    pub heat_mu: f64,
    pub heat_t: f64,
    pub heat_dt: f64,
}

impl RadialConfig {
    pub fn new(grid: &TorusGrid) -> Self {
        Self {
            grid: grid.clone(),
            sigma: 0.08 * grid.period(),
            amplitude_a: 1e-3,
            amplitude_b: 1e-3,
            mu: 0.1,
            t_run: 0.01,
            policy: StepPolicy::default(),
            heat_mu: 0.05,
            heat_t: 1.0,
            heat_dt: 1e-2,
        }
    }

    /// Value of one periodic image at the nearest cell edge, doubled to
    /// cover the remaining images.
    pub fn periodization_bound(&self) -> f64 {
        let half = 0.5 * self.grid.period();
        2.0 * (-(half * half) / (self.sigma * self.sigma)).exp()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::param("radial.sigma", format!("must be positive, got {}", self.sigma)));
        }
        let bound = self.periodization_bound();
        if bound > PERIODIZATION_LIMIT {
            return Err(Error::param(
                "radial.sigma",
                format!("bump too wide: periodization error {bound:e} exceeds {PERIODIZATION_LIMIT:e}"),
            ));
        }
        for (name, v) in [("radial.mu", self.mu), ("radial.heat_mu", self.heat_mu)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.heat_dt > 0.0 && self.heat_t >= 0.0 && self.t_run >= 0.0) {
            return Err(Error::param("radial", "durations must be non-negative and heat_dt positive"));
        }
        self.policy.validate()
    }

    pub fn bump(&self, amplitude: f64) -> Result<ScalarField> {
        let c = 0.5 * self.grid.period();
        let s2 = self.sigma * self.sigma;
        ScalarField::from_fn(&self.grid, |x, y| {
            amplitude * (-((x - c).powi(2) + (y - c).powi(2)) / s2).exp()
        })
    }
}

/// Residuals of the radial identities along a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSample {
    pub t: f64,
    /// `||J2(a)||_inf / (||grad a||_inf ||grad Lap a||_inf)`.
    pub j2: f64,
    /// `||curl((curl B) x B)||_2 / (||curl B||_2 ||B||_inf)`.
    pub hall: f64,
    /// `||div B||_inf / ||grad grad a||_inf`.
    pub divergence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatSample {
    pub t: f64,
    /// Amplitude of the `cos(2 pi y / L)` mode relative to its initial value.
    pub ratio: f64,
    pub expected: f64,
    pub rel_err: f64,
    /// Largest coefficient outside the initial mode.
    pub leakage: f64,
}

#[derive(Debug, Clone)]
pub struct RadialReport {
    pub sigma: f64,
    pub periodization_bound: f64,
    pub history: Vec<RadialSample>,
    pub heat: Vec<HeatSample>,
    pub max_j2: f64,
    pub max_hall: f64,
    pub max_divergence: f64,
    pub max_heat_err: f64,
}

/// Radial cancellation residuals for a single state.
pub fn radial_residuals(state: &StateAB) -> RadialSample {
    let a = &state.a;
    let (ax, ay) = (a.dx(), a.dy());
    let grad_a = ax.max_abs().max(ay.max_abs());
    let lap_a = a.laplacian();
    let grad_lap = lap_a.dx().max_abs().max(lap_a.dy().max_abs());
    let j2 = ratio(hall_j2(a).max_abs(), grad_a * grad_lap);

    let field = magnetic_field(state);
    let hall = ratio(
        hall_term_3d(&field).l2_norm(),
        field.curl().l2_norm() * field.max_magnitude(),
    );
    let hessian = [(2, 0), (1, 1), (0, 2)]
        .iter()
        .map(|&(m1, m2)| a.derivative_unchecked(m1, m2).max_abs())
        .fold(0.0, f64::max);
    let divergence = ratio(field.divergence().max_abs(), hessian);
    RadialSample {
        t: state.t,
        j2,
        hall,
        divergence,
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

/// Radial cancellations along an EMHD1 run of centered bumps, and the exact
/// heat decay of `b` in EMHD2.
pub fn run_radial_suite(config: &RadialConfig) -> Result<RadialReport> {
    config.validate()?;
    let grid = &config.grid;
    let state = StateAB::new(
        config.bump(config.amplitude_a)?,
        config.bump(config.amplitude_b)?,
        0.0,
        config.mu,
    )?;
    let mut history = Vec::new();
    let mut record = |s: &Sample<'_>| -> Result<()> {
        history.push(radial_residuals(s.state));
        Ok(())
    };
    integrate(
        &state,
        &RunSettings {
            t_end: config.t_run,
            variant: Variant::Emhd1,
            forcing: None,
            policy: config.policy,
            cadence: 1,
        },
        &mut [&mut record],
    )?;

    let heat = heat_check(grid, config.heat_mu, config.heat_t, config.heat_dt)?;
    let max = |v: &mut dyn Iterator<Item = f64>| v.fold(0.0, f64::max);
    Ok(RadialReport {
        sigma: config.sigma,
        periodization_bound: config.periodization_bound(),
        max_j2: max(&mut history.iter().map(|s| s.j2)),
        max_hall: max(&mut history.iter().map(|s| s.hall)),
        max_divergence: max(&mut history.iter().map(|s| s.divergence)),
        max_heat_err: max(&mut heat.iter().map(|s| s.rel_err)),
        history,
        heat,
    })
}

/// EMHD2 with `a = 0`, `b = cos(2 pi y / L)`: the mode must decay like
/// `exp(-mu (2 pi / L)^2 t)` and nothing else may appear.
pub fn heat_check(grid: &TorusGrid, mu: f64, t_end: f64, dt: f64) -> Result<Vec<HeatSample>> {
    let kappa = grid.base_wavenumber();
    let b = ScalarField::from_fn(grid, |_, y| (kappa * y).cos())?;
    let state = StateAB::new(ScalarField::zeros(grid), b, 0.0, mu)?;
    let c0 = state.b.coefficient(0, 1).re;
    let (i_plus, i_minus) = (grid.index_of(0, 1), grid.index_of(0, -1));
    let mut out = Vec::new();
    let mut record = |s: &Sample<'_>| -> Result<()> {
        let expected = (-mu * kappa * kappa * s.state.t).exp();
        let ratio = s.state.b.coefficient(0, 1).re / c0;
        let leakage = s
            .state
            .b
            .spectral()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != i_plus && *i != i_minus)
            .chain(s.state.a.spectral().iter().enumerate())
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max);
        out.push(HeatSample {
            t: s.state.t,
            ratio,
            expected,
            rel_err: (ratio - expected).abs() / expected,
            leakage,
        });
        Ok(())
    };
    integrate(
        &state,
        &RunSettings {
            t_end,
            variant: Variant::Emhd2,
            forcing: None,
            policy: StepPolicy::fixed(dt),
            cadence: 1,
        },
        &mut [&mut record],
    )?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn periodization_bound_of_default_bump() {
        let c = RadialConfig::new(&TorusGrid::unit(64).unwrap());
        assert!(c.periodization_bound() < 1e-16);
        let mut wide = c.clone();
        wide.sigma = 0.2;
        assert!(wide.validate().is_err());
    }

    #[test]
    fn heat_oracle_is_exact() {
        let g = TorusGrid::unit(32).unwrap();
        let samples = heat_check(&g, 0.05, 1.0, 0.01).unwrap();
        let last = samples.last().unwrap();
        assert_eq!(last.t, 1.0);
        assert!((last.expected - 0.138_911_1).abs() < 1e-7);
        assert!(samples.iter().all(|s| s.rel_err < 1e-12 && s.leakage < 1e-15));
    }

    #[test]
    fn radial_bump_cancels_at_moderate_resolution() {
        let g = TorusGrid::unit(96).unwrap();
        let mut c = RadialConfig::new(&g);
        c.t_run = 0.002;
        let rep = run_radial_suite(&c).unwrap();
        assert!(rep.max_j2 < 1e-10, "{}", rep.max_j2);
        assert!(rep.max_hall < 1e-9, "{}", rep.max_hall);
        assert!(rep.max_divergence < 1e-12);
    }

    #[test]
    fn off_center_non_radial_data_does_not_cancel() {
        let g = TorusGrid::unit(32).unwrap();
        let a = ScalarField::from_fn(&g, |x, y| (2.0 * PI * x).sin() + (4.0 * PI * y).cos())
            .unwrap();
        let s = StateAB::new(a.clone(), a, 0.0, 0.1).unwrap();
        let r = radial_residuals(&s);
        assert!(r.j2 > 1e-3);
    }
}
