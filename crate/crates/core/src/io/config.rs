use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use super::IoError;
use crate::experiments::{RadialConfig, SyncConfig};
use crate::integrator::{RunSettings, StepPolicy};
use crate::model::{ForcingMode, ForcingSpec, Modulation, Variant};
use crate::spectral::TorusGrid;
use crate::wavenumber::{LpsExponents, WavenumberParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepModeKind {
    Fixed,
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub mode: StepModeKind,
    pub dt: f64,
    pub cfl: f64,
    pub dt_max: f64,
    pub dt_min: f64,
}

impl IntegratorConfig {
    pub fn policy(&self) -> StepPolicy {
        match self.mode {
            StepModeKind::Fixed => StepPolicy::fixed(self.dt),
            StepModeKind::Adaptive => StepPolicy::adaptive(self.cfl, self.dt_max, self.dt_min),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagConfig {
    pub r: f64,
    pub c_r: f64,
    /// Time exponent of the integrability monitor; critical value when unset.
    pub s: Option<f64>,
    pub cadence: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncParams {
    /// Sobolev exponent of the difference norm.
    pub s: f64,
    pub energy: f64,
    /// Seed of the second run; `init.seed + 1` when unset.
    pub seed2: Option<u64>,
    pub q_floor: Option<i32>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialParams {
    pub sigma: f64,
    pub amplitude_a: f64,
    pub amplitude_b: f64,
    pub t_run: f64,
    pub heat_mu: f64,
    pub heat_t: f64,
    pub heat_dt: f64,
}

/// Fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: usize,
    pub period: f64,
    pub variant: Variant,
    pub mu: f64,
    pub forcing: ForcingSpec,
    pub integrator: IntegratorConfig,
    pub t_end: f64,
    pub diag: DiagConfig,
    pub init_energy: f64,
    pub seed: u64,
    pub sync: SyncParams,
    pub radial: RadialParams,
    pub scale_m: u32,
    pub output_dir: PathBuf,
}

impl RunConfig {
    /// Defaults for a grid of `n` points per side.
    pub fn with_n(n: usize) -> Self {
        Self {
            n,
            period: 1.0,
            variant: Variant::Emhd1,
            mu: 0.1,
            forcing: ForcingSpec::default(),
            integrator: IntegratorConfig {
                mode: StepModeKind::Adaptive,
                dt: 1e-3,
                cfl: 0.5,
                dt_max: 1e-2,
                dt_min: 1e-9,
            },
            t_end: 1.0,
            diag: DiagConfig {
                r: 3.0,
                c_r: 0.01,
                s: None,
                cadence: 10,
            },
            init_energy: 1.0,
            seed: 0,
            sync: SyncParams {
                s: -0.5,
                energy: 1e-8,
                seed2: None,
                q_floor: None,
            },
            radial: RadialParams {
                sigma: 0.08,
                amplitude_a: 1e-3,
                amplitude_b: 1e-3,
                t_run: 0.01,
                heat_mu: 0.05,
                heat_t: 1.0,
                heat_dt: 1e-2,
            },
            scale_m: 1,
            output_dir: PathBuf::from("out"),
        }
    }

    pub fn grid(&self) -> crate::Result<TorusGrid> {
        TorusGrid::new(self.n, self.period)
    }

    pub fn wavenumber_params(&self) -> WavenumberParams {
        WavenumberParams::new(self.diag.r, self.diag.c_r)
    }

    pub fn lps_exponents(&self) -> crate::Result<LpsExponents> {
        LpsExponents::new(self.diag.r, self.diag.s)
    }

    pub fn run_settings(&self) -> RunSettings<'_> {
        RunSettings {
            t_end: self.t_end,
            variant: self.variant,
            forcing: (!self.forcing.is_empty()).then_some(&self.forcing),
            policy: self.integrator.policy(),
            cadence: self.diag.cadence,
        }
    }

    pub fn sync_config(&self) -> crate::Result<SyncConfig> {
        let mut c = SyncConfig::new(&self.grid()?);
        c.mu = self.mu;
        c.variant = self.variant;
        c.forcing = self.forcing.clone();
        c.policy = self.integrator.policy();
        c.t_end = self.t_end;
        c.wavenumber = self.wavenumber_params();
        c.s = self.sync.s;
        c.energy = self.sync.energy;
        c.seeds = (self.seed, self.sync.seed2.unwrap_or(self.seed.wrapping_add(1)));
        c.q_floor = self.sync.q_floor;
        c.cadence = self.diag.cadence;
        Ok(c)
    }

    pub fn radial_config(&self) -> crate::Result<RadialConfig> {
        let mut c = RadialConfig::new(&self.grid()?);
        let p = &self.radial;
        c.sigma = p.sigma * self.period;
        c.amplitude_a = p.amplitude_a;
        c.amplitude_b = p.amplitude_b;
        c.mu = self.mu;
        c.t_run = p.t_run;
        c.policy = self.integrator.policy();
        c.heat_mu = p.heat_mu;
        c.heat_t = p.heat_t;
        c.heat_dt = p.heat_dt;
        Ok(c)
    }

    /// Every key with its value, in a form [`load_config`] reads back to `self`.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        put("grid.n", self.n.to_string());
        put("grid.l", fmt_f(self.period));
        put("physics.variant", self.variant.to_string());
        put("physics.mu", fmt_f(self.mu));
        put("forcing.a", fmt_modes(&self.forcing.a_modes));
        put("forcing.b", fmt_modes(&self.forcing.b_modes));
        if let Modulation::Sine { omega } = self.forcing.modulation {
            put("forcing.omega", fmt_f(omega));
        }
        let i = &self.integrator;
        put(
            "integrator.mode",
            match i.mode {
                StepModeKind::Fixed => "fixed".into(),
                StepModeKind::Adaptive => "adaptive".into(),
            },
        );
        put("integrator.dt", fmt_f(i.dt));
        put("integrator.cfl", fmt_f(i.cfl));
        put("integrator.dt_max", fmt_f(i.dt_max));
        put("integrator.dt_min", fmt_f(i.dt_min));
        put("run.t_end", fmt_f(self.t_end));
        put("diag.r", fmt_f(self.diag.r));
        put("diag.c_r", fmt_f(self.diag.c_r));
        if let Some(s) = self.diag.s {
            put("diag.s", fmt_f(s));
        }
        put("diag.cadence", self.diag.cadence.to_string());
        put("init.energy", fmt_f(self.init_energy));
        put("init.seed", self.seed.to_string());
        put("sync.s", fmt_f(self.sync.s));
        put("sync.energy", fmt_f(self.sync.energy));
        if let Some(s) = self.sync.seed2 {
            put("sync.seed2", s.to_string());
        }
        if let Some(q) = self.sync.q_floor {
            put("sync.q_floor", q.to_string());
        }
        let r = &self.radial;
        put("radial.sigma", fmt_f(r.sigma));
        put("radial.amplitude_a", fmt_f(r.amplitude_a));
        put("radial.amplitude_b", fmt_f(r.amplitude_b));
        put("radial.t_run", fmt_f(r.t_run));
        put("radial.heat_mu", fmt_f(r.heat_mu));
        put("radial.heat_t", fmt_f(r.heat_t));
        put("radial.heat_dt", fmt_f(r.heat_dt));
        put("scale.m", self.scale_m.to_string());
        put("output.dir", self.output_dir.display().to_string());
        out
    }

    /// Cross-field constraints; returns every violation found.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let grid = match self.grid() {
            Ok(g) => Some(g),
            Err(e) => {
                v.push(format!("grid: {e}"));
                None
            }
        };
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            v.push(format!("physics.mu: must be positive, got {}", self.mu));
        }
        if let Some(g) = &grid {
            if let Err(e) = self.forcing.validate(g) {
                v.push(format!("forcing: {e}"));
            }
        }
        let i = &self.integrator;
        if i.mode == StepModeKind::Fixed && !(i.dt > 0.0 && i.dt.is_finite()) {
            v.push(format!("integrator.dt: must be positive, got {}", i.dt));
        }
        if let Err(e) = self.integrator.policy().validate() {
            v.push(e.to_string());
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            v.push(format!("run.t_end: must be non-negative, got {}", self.t_end));
        }
        let d = &self.diag;
        if !(d.r >= 2.0) {
            v.push(format!("diag.r: must be >= 2, got {}", d.r));
        }
        if !(d.c_r > 0.0 && d.c_r.is_finite()) {
            v.push(format!("diag.c_r: must be positive, got {}", d.c_r));
        }
        if d.s.is_some() {
            if let Err(e) = self.lps_exponents() {
                v.push(format!("diag.s: {e}"));
            }
        }
        if d.cadence == 0 {
            v.push("diag.cadence: must be >= 1".into());
        }
        if !(self.init_energy > 0.0 && self.init_energy.is_finite()) {
            v.push(format!("init.energy: must be positive, got {}", self.init_energy));
        }
        if !(self.sync.energy > 0.0 && self.sync.energy.is_finite()) {
            v.push(format!("sync.energy: must be positive, got {}", self.sync.energy));
        }
        if grid.is_some() {
            if let Err(e) = self.radial_config().and_then(|c| c.validate()) {
                v.push(e.to_string());
            }
        }
        if self.scale_m > 8 {
            v.push(format!("scale.m: at most 8, got {}", self.scale_m));
        }
        v
    }
}

/// Parses `key=value` lines (`#` starts a comment), fills defaults, and
/// validates. All problems are reported together.
pub fn load_config(text: &str) -> Result<RunConfig, IoError> {
    let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut problems = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            problems.push(format!("line {}: expected key=value, got `{line}`", lineno + 1));
            continue;
        };
        let key = k.trim().to_ascii_lowercase();
        let value = v.trim().trim_matches('"').to_string();
        if entries.insert(key.clone(), (lineno + 1, value)).is_some() {
            problems.push(format!("line {}: duplicate key `{key}`", lineno + 1));
        }
    }

    let mut cfg = RunConfig::with_n(0);
    let mut reader = Reader {
        entries: &mut entries,
        problems: &mut problems,
    };
    match reader.take::<usize>("grid.n") {
        Some(n) => cfg.n = n,
        None if !reader.problems.iter().any(|p| p.contains("grid.n")) => {
            reader.problems.push("grid.n: required key missing".into())
        }
        None => {}
    }
    reader.set(&mut cfg.period, "grid.l");
    reader.set(&mut cfg.variant, "physics.variant");
    reader.set(&mut cfg.mu, "physics.mu");
    if let Some(s) = reader.take_str("forcing.a") {
        cfg.forcing.a_modes = reader.modes("forcing.a", &s);
    }
    if let Some(s) = reader.take_str("forcing.b") {
        cfg.forcing.b_modes = reader.modes("forcing.b", &s);
    }
    if let Some(omega) = reader.take::<f64>("forcing.omega") {
        cfg.forcing.modulation = Modulation::Sine { omega };
    }
    if let Some(mode) = reader.take_str("integrator.mode") {
        match mode.to_ascii_lowercase().as_str() {
            "fixed" => cfg.integrator.mode = StepModeKind::Fixed,
            "adaptive" => cfg.integrator.mode = StepModeKind::Adaptive,
            other => reader
                .problems
                .push(format!("integrator.mode: expected fixed or adaptive, got `{other}`")),
        }
    }
    reader.set(&mut cfg.integrator.dt, "integrator.dt");
    reader.set(&mut cfg.integrator.cfl, "integrator.cfl");
    reader.set(&mut cfg.integrator.dt_max, "integrator.dt_max");
    reader.set(&mut cfg.integrator.dt_min, "integrator.dt_min");
    reader.set(&mut cfg.t_end, "run.t_end");
    reader.set(&mut cfg.diag.r, "diag.r");
    reader.set(&mut cfg.diag.c_r, "diag.c_r");
    cfg.diag.s = reader.take("diag.s");
    reader.set(&mut cfg.diag.cadence, "diag.cadence");
    reader.set(&mut cfg.init_energy, "init.energy");
    reader.set(&mut cfg.seed, "init.seed");
    reader.set(&mut cfg.sync.s, "sync.s");
    reader.set(&mut cfg.sync.energy, "sync.energy");
    cfg.sync.seed2 = reader.take("sync.seed2");
    cfg.sync.q_floor = reader.take("sync.q_floor");
    reader.set(&mut cfg.radial.sigma, "radial.sigma");
    reader.set(&mut cfg.radial.amplitude_a, "radial.amplitude_a");
    reader.set(&mut cfg.radial.amplitude_b, "radial.amplitude_b");
    reader.set(&mut cfg.radial.t_run, "radial.t_run");
    reader.set(&mut cfg.radial.heat_mu, "radial.heat_mu");
    reader.set(&mut cfg.radial.heat_t, "radial.heat_t");
    reader.set(&mut cfg.radial.heat_dt, "radial.heat_dt");
    reader.set(&mut cfg.scale_m, "scale.m");
    if let Some(dir) = reader.take_str("output.dir") {
        cfg.output_dir = PathBuf::from(dir);
    }
    for (key, (line, _)) in entries.iter() {
        problems.push(format!("line {line}: unknown key `{key}`"));
    }
    if cfg.n != 0 {
        problems.extend(cfg.violations());
    }
    if problems.is_empty() {
        Ok(cfg)
    } else {
        Err(IoError::Config(problems))
    }
}

struct Reader<'a> {
    entries: &'a mut BTreeMap<String, (usize, String)>,
    problems: &'a mut Vec<String>,
}

impl Reader<'_> {
    fn take_str(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key).map(|(_, v)| v)
    }

    fn take<T: FromStr>(&mut self, key: &str) -> Option<T>
    where
        T::Err: std::fmt::Display,
    {
        let (line, raw) = self.entries.remove(key)?;
        match raw.parse::<T>() {
            Ok(v) => Some(v),
            Err(e) => {
                self.problems.push(format!("line {line}: {key}: cannot parse `{raw}`: {e}"));
                None
            }
        }
    }

    fn set<T: FromStr>(&mut self, slot: &mut T, key: &str)
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = self.take(key) {
            *slot = v;
        }
    }

    /// `k1 k2 amplitude phase` tuples separated by `;`.
    fn modes(&mut self, key: &str, text: &str) -> Vec<ForcingMode> {
        let mut out = Vec::new();
        for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let parts: Vec<&str> = item.split_whitespace().collect();
            let parsed = (parts.len() == 4)
                .then(|| {
                    Some(ForcingMode {
                        k1: parts[0].parse().ok()?,
                        k2: parts[1].parse().ok()?,
                        amplitude: parts[2].parse().ok()?,
                        phase: parts[3].parse().ok()?,
                    })
                })
                .flatten();
            match parsed {
                Some(m) => out.push(m),
                None => self
                    .problems
                    .push(format!("{key}: expected `k1 k2 amplitude phase`, got `{item}`")),
            }
        }
        out
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:?}")
}

fn fmt_modes(modes: &[ForcingMode]) -> String {
    modes
        .iter()
        .map(|m| format!("{} {} {:?} {:?}", m.k1, m.k2, m.amplitude, m.phase))
        .collect::<Vec<_>>()
        .join("; ")
}
