//! Time stepping: integrating-factor RK4 (Lawson) with whistler-scaled step control.
//!
//! Resistive diffusion `mu Lap` is carried exactly by the factor
//! `exp(-mu kappa^2 dt)` per mode; the nonlinearity and forcing go through
//! classical RK4 in the transformed variables. Energy dissipation and forcing
//! work are accumulated with the same stage weights, so the discrete energy
//! budget is fourth-order accurate.

use num_complex::Complex64;

use crate::model::{
    energy_and_dissipation_spectral, forcing_eval, forcing_work, nonlinear_rhs, ForcingSpec, StateAB,
    Variant,
};
use crate::spectral::{ensure_physical_pair, ScalarField};
use crate::{Error, Result};

/// Guards the CFL estimate against the zero state.
pub const CFL_EPSILON: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepMode {
    Fixed { dt: f64 },
    Adaptive { cfl: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPolicy {
    pub mode: StepMode,
    pub dt_max: f64,
    /// Steps suggested below this abort the run.
    pub dt_min: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self {
            mode: StepMode::Adaptive { cfl: 0.5 },
            dt_max: 1e-2,
            dt_min: 1e-9,
        }
    }
}

impl StepPolicy {
    pub fn fixed(dt: f64) -> Self {
        Self {
            mode: StepMode::Fixed { dt },
            dt_max: dt,
            dt_min: 0.0,
        }
    }

    pub fn adaptive(cfl: f64, dt_max: f64, dt_min: f64) -> Self {
        Self {
            mode: StepMode::Adaptive { cfl },
            dt_max,
            dt_min,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.mode {
            StepMode::Fixed { dt } => {
                if !(dt > 0.0 && dt.is_finite()) {
                    return Err(Error::param("integrator.dt", format!("must be positive, got {dt}")));
                }
            }
            StepMode::Adaptive { cfl } => {
                if !(cfl > 0.0 && cfl <= 1.0) {
                    return Err(Error::param("integrator.cfl", format!("must lie in (0, 1], got {cfl}")));
                }
                if !(self.dt_min < self.dt_max) {
                    return Err(Error::param(
                        "integrator.dt_min",
                        format!("dt_min {} must be below dt_max {}", self.dt_min, self.dt_max),
                    ));
                }
            }
        }
        if !(self.dt_max > 0.0 && self.dt_max.is_finite()) || self.dt_min < 0.0 {
            return Err(Error::param("integrator.dt_max", "step bounds must be positive and finite"));
        }
        Ok(())
    }
}

/// Energy budget increments over one step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepBudget {
    /// `mu int D dt` over the step.
    pub dissipated: f64,
    /// `int (int f . B) dt` over the step.
    pub work: f64,
}

/// One integrating-factor RK4 step of size `dt`.
pub fn step(state: &StateAB, dt: f64, variant: Variant, forcing: Option<&ForcingSpec>) -> Result<StateAB> {
    step_with_budget(state, dt, variant, forcing).map(|(s, _)| s)
}

/// As [`step`], also returning the dissipation and forcing-work integrals.
pub fn step_with_budget(
    state: &StateAB,
    dt: f64,
    variant: Variant,
    forcing: Option<&ForcingSpec>,
) -> Result<(StateAB, StepBudget)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param("dt", format!("must be positive, got {dt}")));
    }
    let grid = state.grid().clone();
    let forcing = forcing.filter(|f| !f.is_empty());
    let (t0, mu) = (state.t, state.mu);
    // e_half[i] = exp(-mu kappa^2 dt / 2), e_full = e_half^2
    let e_half: Vec<f64> = (0..grid.len())
        .map(|i| (-0.5 * mu * grid.kappa_squared(i) * dt).exp())
        .collect();

    let rhs = |s: &StateAB| -> Result<(Vec<Complex64>, Vec<Complex64>, f64, f64)> {
        let (na, nb) = nonlinear_rhs(s, variant);
        let (_, d) = energy_and_dissipation_spectral(s);
        let (mut na, mut nb) = (na.into_spectral(), nb.into_spectral());
        let mut w = 0.0;
        if let Some(spec) = forcing {
            let (fa, fb) = forcing_eval(spec, &grid, s.t)?;
            w = forcing_work(s, &fa, &fb);
            add_assign(&mut na, fa.spectral());
            add_assign(&mut nb, fb.spectral());
        }
        Ok((na, nb, d, w))
    };
    let make = |a: Vec<Complex64>, b: Vec<Complex64>, t: f64| StateAB {
        a: ScalarField::from_spectral_raw(&grid, a),
        b: ScalarField::from_spectral_raw(&grid, b),
        t,
        mu,
    };

    let (a0, b0) = (state.a.spectral(), state.b.spectral());
    let h = dt;

    let (k1a, k1b, d1, w1) = rhs(state)?;
    // u_a = E_half (u + h/2 k1)
    let stage_a = |u: &[Complex64], k: &[Complex64]| -> Vec<Complex64> {
        (0..u.len()).map(|i| (u[i] + 0.5 * h * k[i]) * e_half[i]).collect()
    };
    let s2 = make(stage_a(a0, &k1a), stage_a(b0, &k1b), t0 + 0.5 * h);
    let (k2a, k2b, d2, w2) = rhs(&s2)?;
    // u_b = E_half u + h/2 k2
    let stage_b = |u: &[Complex64], k: &[Complex64]| -> Vec<Complex64> {
        (0..u.len()).map(|i| u[i] * e_half[i] + 0.5 * h * k[i]).collect()
    };
    let s3 = make(stage_b(a0, &k2a), stage_b(b0, &k2b), t0 + 0.5 * h);
    let (k3a, k3b, d3, w3) = rhs(&s3)?;
    // u_c = E u + h E_half k3
    let stage_c = |u: &[Complex64], k: &[Complex64]| -> Vec<Complex64> {
        (0..u.len())
            .map(|i| {
                let e = e_half[i];
                u[i] * (e * e) + h * e * k[i]
            })
            .collect()
    };
    let s4 = make(stage_c(a0, &k3a), stage_c(b0, &k3b), t0 + h);
    let (k4a, k4b, d4, w4) = rhs(&s4)?;

    // u_new = E u + h/6 (E k1 + 2 E_half (k2 + k3) + k4)
    let combine = |u: &[Complex64], k1: &[Complex64], k2: &[Complex64], k3: &[Complex64], k4: &[Complex64]| {
        let mut out: Vec<Complex64> = (0..u.len())
            .map(|i| {
                let e = e_half[i];
                let full = e * e;
                u[i] * full + h / 6.0 * (k1[i] * full + 2.0 * e * (k2[i] + k3[i]) + k4[i])
            })
            .collect();
        for (i, z) in out.iter_mut().enumerate() {
            if !grid.is_retained(i) {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        out
    };
    let next = make(
        combine(a0, &k1a, &k2a, &k3a, &k4a),
        combine(b0, &k1b, &k2b, &k3b, &k4b),
        t0 + h,
    );
    if !next.is_finite() {
        return Err(Error::BlowUp {
            t: t0,
            reason: format!("non-finite field values after step of size {h:e}"),
        });
    }
    let budget = StepBudget {
        dissipated: mu * h / 6.0 * (d1 + 2.0 * d2 + 2.0 * d3 + d4),
        work: h / 6.0 * (w1 + 2.0 * w2 + 2.0 * w3 + w4),
    };
    Ok((next, budget))
}

fn add_assign(dst: &mut [Complex64], src: &[Complex64]) {
    dst.iter_mut().zip(src).for_each(|(d, s)| *d += s);
}

/// Stability-limited step, capped at `dt_max`. Fixed policies return their `dt`.
///
/// EMHD1 is limited by whistler waves:
/// `C / ((||grad a||_inf + ||b||_inf + eps) kappa_max^2)`. In EMHD2 `b` only
/// diffuses and `a` is advected by `curl(b e_z)`, giving the transport limit
/// `C / ((||grad b||_inf + eps) kappa_max)`. Here `kappa_max = 2 pi floor(N/3) / L`.
pub fn suggest_dt(state: &StateAB, policy: &StepPolicy, variant: Variant) -> Result<f64> {
    let cfl = match policy.mode {
        StepMode::Fixed { dt } => return Ok(dt),
        StepMode::Adaptive { cfl } => cfl,
    };
    let kappa = state.grid().kappa_max();
    let max_gradient = |f: &ScalarField| {
        let (fx, fy) = (f.dx(), f.dy());
        let (px, py) = ensure_physical_pair(&fx, &fy);
        px.iter().zip(py).map(|(x, y)| x.hypot(*y)).fold(0.0, f64::max)
    };
    let rate = match variant {
        Variant::Emhd1 => (max_gradient(&state.a) + state.b.max_abs() + CFL_EPSILON) * kappa * kappa,
        Variant::Emhd2 => (max_gradient(&state.b) + CFL_EPSILON) * kappa,
    };
    let dt = (cfl / rate).min(policy.dt_max);
    if dt < policy.dt_min {
        return Err(Error::StepTooSmall {
            t: state.t,
            dt,
            dt_min: policy.dt_min,
        });
    }
    Ok(dt)
}

/// What a hook sees at each sample.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub state: &'a StateAB,
    pub step: usize,
    /// `mu int_0^t D` accumulated so far.
    pub dissipated: f64,
    /// Forcing work accumulated so far.
    pub work: f64,
}

/// Observer invoked on the integration cadence.
pub trait Hook {
    fn observe(&mut self, sample: &Sample<'_>) -> Result<()>;
}

impl<F: FnMut(&Sample<'_>) -> Result<()>> Hook for F {
    fn observe(&mut self, sample: &Sample<'_>) -> Result<()> {
        self(sample)
    }
}

#[derive(Debug, Clone)]
pub struct RunSettings<'a> {
    pub t_end: f64,
    pub variant: Variant,
    pub forcing: Option<&'a ForcingSpec>,
    pub policy: StepPolicy,
    /// Hooks fire every `cadence` steps, at the start, and at the end.
    pub cadence: usize,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: StateAB,
    pub steps: usize,
    pub dissipated: f64,
    pub work: f64,
}

/// Advances `state0` to `t_end`, shortening the final step to land exactly.
pub fn integrate(state0: &StateAB, settings: &RunSettings<'_>, hooks: &mut [&mut dyn Hook]) -> Result<RunOutcome> {
    settings.policy.validate()?;
    if !(settings.t_end >= state0.t) {
        return Err(Error::param("t_end", format!("{} precedes the initial time {}", settings.t_end, state0.t)));
    }
    if let Some(f) = settings.forcing {
        f.validate(state0.grid())?;
    }
    let cadence = settings.cadence.max(1);
    let mut state = state0.clone();
    let mut dissipated = 0.0;
    let mut work = 0.0;
    let mut steps = 0usize;
    let fire = |state: &StateAB, steps, dissipated, work, hooks: &mut [&mut dyn Hook]| -> Result<()> {
        let sample = Sample {
            state,
            step: steps,
            dissipated,
            work,
        };
        hooks.iter_mut().try_for_each(|h| h.observe(&sample))
    };
    fire(&state, steps, dissipated, work, hooks)?;

    // relative slack so accumulated round-off in t does not force a sliver step
    let slack = 1e-12 * settings.t_end.abs().max(1.0);
    while state.t < settings.t_end - slack {
        let mut dt = suggest_dt(&state, &settings.policy, settings.variant)?;
        let remaining = settings.t_end - state.t;
        if dt >= remaining - slack {
            dt = remaining;
        }
        let (next, budget) = step_with_budget(&state, dt, settings.variant, settings.forcing)?;
        state = next;
        dissipated += budget.dissipated;
        work += budget.work;
        steps += 1;
        let at_end = state.t >= settings.t_end - slack;
        if at_end {
            state.t = settings.t_end;
        }
        if steps.is_multiple_of(cadence) || at_end {
            fire(&state, steps, dissipated, work, hooks)?;
        }
    }
    Ok(RunOutcome {
        state,
        steps,
        dissipated,
        work,
    })
}
