use num_complex::Complex64;

use crate::exec;
use crate::integrator::{step, suggest_dt, StepPolicy};
use crate::littlewood_paley::DyadicFilterBank;
use crate::model::{ForcingSpec, StateAB, Variant, VectorField3};
use crate::random::low_mode_state;
use crate::spectral::{ScalarField, TorusGrid};
use crate::wavenumber::{dissipation_wavenumber, ShellIndex, WavenumberParams};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct SyncConfig {
    pub grid: TorusGrid,
    pub mu: f64,
    pub variant: Variant,
    pub forcing: ForcingSpec,
    pub policy: StepPolicy,
    pub t_end: f64,
    pub wavenumber: WavenumberParams,
    /// Sobolev exponent of the difference norm.
    pub s: f64,
    /// Energy of each random initial state.
    pub energy: f64,
    pub seeds: (u64, u64),
    /// Lower bound on the synchronized shell index.
    pub q_floor: Option<i32>,
    /// Record every `cadence` steps (plus start and end).
    pub cadence: usize,
}

impl SyncConfig {
    pub fn new(grid: &TorusGrid) -> Self {
        Self {
            grid: grid.clone(),
            mu: 0.1,
            variant: Variant::Emhd1,
            forcing: ForcingSpec::default(),
            policy: StepPolicy::default(),
            t_end: 5.0,
            wavenumber: WavenumberParams::default(),
            s: -0.5,
            energy: 1e-8,
            seeds: (1, 2),
            q_floor: None,
            cadence: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (n, r) = (self.wavenumber.n, self.wavenumber.r);
        if !(self.s > -n / r && self.s < n / r - 1.0) {
            return Err(Error::param(
                "sync.s",
                format!("must lie in ({}, {}) for r = {r}, got {}", -n / r, n / r - 1.0, self.s),
            ));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::param("run.t_end", format!("must be non-negative, got {}", self.t_end)));
        }
        if self.seeds.0 == self.seeds.1 {
            log::warn!("both synchronization runs use seed {}", self.seeds.0);
        }
        self.policy.validate()?;
        self.forcing.validate(&self.grid)
    }
}

/// One recorded synchronization point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncSample {
    pub t: f64,
    /// `||B1 - B2||_{H^s}` after synchronization.
    pub hs_norm: f64,
    pub q_index: ShellIndex,
    pub lambda_q: f64,
    pub q_first: ShellIndex,
    pub q_second: ShellIndex,
    /// `||h_{<=Q}||_{H^s} / ||h||_{H^s}` accumulated since the previous overwrite.
    pub drift: f64,
    /// The same ratio right after the overwrite.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct SyncReport {
    pub s: f64,
    pub r: f64,
    pub c_r: f64,
    pub samples: Vec<SyncSample>,
    /// First over last `H^s` norm.
    pub decay_ratio: f64,
    /// `H^s` norm non-increasing over samples after the first 10% of the run.
    pub monotone_after_transient: bool,
    pub max_residual: f64,
    pub max_drift: f64,
    pub steps: usize,
    /// Set when either run aborted; the samples then cover the run up to the abort.
    pub abort: Option<Error>,
}

impl SyncReport {
    fn finish(mut self, t_end: f64) -> Self {
        let (first, last) = match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => (a.hs_norm, b.hs_norm),
            _ => (0.0, 0.0),
        };
        self.decay_ratio = if last > 0.0 { first / last } else if first > 0.0 { f64::INFINITY } else { 1.0 };
        let t0 = self.samples.first().map_or(0.0, |s| s.t);
        let transient = t0 + 0.1 * (t_end - t0);
        let tail: Vec<f64> = self
            .samples
            .iter()
            .filter(|s| s.t >= transient)
            .map(|s| s.hs_norm)
            .collect();
        self.monotone_after_transient = tail.windows(2).all(|w| w[1] <= w[0]);
        self.max_residual = self.samples.iter().map(|s| s.residual).fold(0.0, f64::max);
        self.max_drift = self.samples.iter().map(|s| s.drift).fold(0.0, f64::max);
        self
    }
}

/// Evolves two random states and, after every step, copies the first state's
/// modes below `lambda_Q` into the second, with `Q` the larger of the two
/// dissipation wavenumber indices.
pub fn run_sync_experiment(config: &SyncConfig) -> Result<SyncReport> {
    config.validate()?;
    let grid = &config.grid;
    let s1 = low_mode_state(grid, config.seeds.0, config.energy, config.mu)?;
    let s2 = low_mode_state(grid, config.seeds.1, config.energy, config.mu)?;
    run_sync_from(config, s1, s2)
}

/// Synchronization run from explicit initial states.
pub fn run_sync_from(config: &SyncConfig, mut s1: StateAB, mut s2: StateAB) -> Result<SyncReport> {
    config.validate()?;
    if *s1.grid() != config.grid || *s2.grid() != config.grid {
        return Err(Error::GridMismatch);
    }
    let bank = DyadicFilterBank::new(&config.grid)?;
    let forcing = (!config.forcing.is_empty()).then_some(&config.forcing);
    let mut report = SyncReport {
        s: config.s,
        r: config.wavenumber.r,
        c_r: config.wavenumber.c_r,
        samples: Vec::new(),
        decay_ratio: 1.0,
        monotone_after_transient: true,
        max_residual: 0.0,
        max_drift: 0.0,
        steps: 0,
        abort: None,
    };
    let sample = synchronize(config, &bank, &s1, &mut s2)?;
    report.samples.push(sample);

    let cadence = config.cadence.max(1);
    let slack = 1e-12 * config.t_end.max(1.0);
    while s1.t < config.t_end - slack {
        let dt = match suggest_dt(&s1, &config.policy, config.variant)
            .and_then(|d1| Ok(d1.min(suggest_dt(&s2, &config.policy, config.variant)?)))
        {
            Ok(dt) => dt.min(config.t_end - s1.t),
            Err(e) => {
                report.abort = Some(e);
                break;
            }
        };
        let (n1, n2) = exec::join(
            config.grid.exec(),
            || step(&s1, dt, config.variant, forcing),
            || step(&s2, dt, config.variant, forcing),
        );
        match (n1, n2) {
            (Ok(a), Ok(b)) => {
                s1 = a;
                s2 = b;
            }
            (Err(e), _) | (_, Err(e)) => {
                report.abort = Some(e);
                break;
            }
        }
        report.steps += 1;
        if s1.t >= config.t_end - slack {
            s1.t = config.t_end;
            s2.t = config.t_end;
        }
        let sample = synchronize(config, &bank, &s1, &mut s2)?;
        if report.steps.is_multiple_of(cadence) || s1.t >= config.t_end {
            report.samples.push(sample);
        }
    }
    Ok(report.finish(config.t_end))
}

fn synchronize(config: &SyncConfig, bank: &DyadicFilterBank, s1: &StateAB, s2: &mut StateAB) -> Result<SyncSample> {
    let r1 = dissipation_wavenumber(s1, &config.wavenumber, bank)?;
    let r2 = dissipation_wavenumber(s2, &config.wavenumber, bank)?;
    let mut q = r1.index.max(r2.index);
    if let Some(floor) = config.q_floor {
        q = q.max(ShellIndex::Finite(floor));
    }
    let drift = lowmode_ratio(config, bank, s1, s2, q)?;
    overwrite_low_modes(s1, s2, q)?;
    let residual = lowmode_ratio(config, bank, s1, s2, q)?;
    let hs_norm = bank.sobolev_norm_vector(&difference(s1, s2).as_refs(), config.s)?;
    Ok(SyncSample {
        t: s1.t,
        hs_norm,
        q_index: q,
        lambda_q: q.lambda(config.grid.period()),
        q_first: r1.index,
        q_second: r2.index,
        drift,
        residual,
    })
}

fn difference(s1: &StateAB, s2: &StateAB) -> VectorField3 {
    &s1.magnetic_field() - &s2.magnetic_field()
}

fn lowmode_ratio(config: &SyncConfig, bank: &DyadicFilterBank, s1: &StateAB, s2: &StateAB, q: ShellIndex) -> Result<f64> {
    let h = difference(s1, s2);
    let total = bank.sobolev_norm_vector(&h.as_refs(), config.s)?;
    if total == 0.0 {
        return Ok(0.0);
    }
    let low = h.map(|c| bank.lowpass(c, q.lowpass_level(bank)));
    Ok(bank.sobolev_norm_vector(&low.as_refs(), config.s)? / total)
}

/// Copies every mode of `src` where the low-pass multiplier at level `q` is
/// nonzero (`|k| < 2^{q+1}`, or everything when unbounded) into `dst`.
pub fn overwrite_low_modes(src: &StateAB, dst: &mut StateAB, q: ShellIndex) -> Result<()> {
    let grid = src.grid().clone();
    let radius = q.finite().map_or(f64::INFINITY, |q| 2f64.powi(q + 1));
    let merge = |from: &ScalarField, into: &ScalarField| -> Result<ScalarField> {
        let coeffs: Vec<Complex64> = into
            .spectral()
            .iter()
            .zip(from.spectral())
            .enumerate()
            .map(|(i, (&keep, &take))| if grid.lattice_norm(i) < radius { take } else { keep })
            .collect();
        ScalarField::from_spectral(&grid, coeffs)
    };
    dst.a = merge(&src.a, &dst.a)?;
    dst.b = merge(&src.b, &dst.b)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short_config(n: usize) -> SyncConfig {
        let mut c = SyncConfig::new(&TorusGrid::unit(n).unwrap());
        c.t_end = 0.2;
        c.policy = StepPolicy::adaptive(0.5, 0.02, 1e-9);
        c
    }

    #[test]
    fn identical_data_gives_zero_difference() {
        let mut c = short_config(32);
        c.seeds = (5, 5);
        let rep = run_sync_experiment(&c).unwrap();
        assert!(rep.abort.is_none());
        assert!(rep.samples.iter().all(|s| s.hs_norm == 0.0));
    }

    #[test]
    fn low_shell_differences_are_removed() {
        let c = short_config(32);
        let g = &c.grid;
        let s1 = low_mode_state(g, 3, 1e-8, c.mu).unwrap();
        // perturb only |k| < 4
        let bump = ScalarField::from_modes(g, |k1, k2| {
            let inside = k1 * k1 + k2 * k2 < 16 && (k1, k2) != (0, 0);
            Complex64::new(if inside { 1e-6 } else { 0.0 }, 0.0)
        });
        let s2 = StateAB::new(&s1.a + &bump, &s1.b - &bump, 0.0, c.mu).unwrap();
        let mut pinned = c.clone();
        pinned.q_floor = Some(1);
        let rep = run_sync_from(&pinned, s1, s2).unwrap();
        assert!(rep.samples[0].drift > 0.9);
        assert!(rep.samples.iter().all(|s| s.hs_norm < 1e-20), "{:?}", rep.samples[0]);
    }

    #[test]
    fn overwrite_enforces_hypothesis_and_difference_decays() {
        let c = short_config(32);
        let rep = run_sync_experiment(&c).unwrap();
        assert!(rep.abort.is_none());
        assert!(rep.max_residual <= 1e-13);
        assert!(rep.samples.iter().all(|s| s.hs_norm >= 0.0));
        assert!(rep.decay_ratio > 1.0);
        assert!(rep.monotone_after_transient);
        assert!(rep
            .samples
            .iter()
            .all(|s| s.q_index == s.q_first.max(s.q_second)));
    }

    #[test]
    fn rejects_exponent_outside_range() {
        let mut c = short_config(16);
        c.s = 0.0;
        assert!(run_sync_experiment(&c).is_err());
    }
}
