use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use emhd_core::experiments::{run_energy_audit, run_radial_suite, run_scaling_check, run_sync_experiment};
use emhd_core::integrator::{integrate, RunSettings, Sample};
use emhd_core::io::{
    fmt_value, load_config, read_snapshot, write_snapshot, CsvSeries, IoError, RunConfig, ENERGY_HEADER, HEAT_HEADER,
    MONITOR_HEADER, RADIAL_HEADER, SCALING_HEADER, SHELL_HEADER, SYNC_HEADER,
};
use emhd_core::littlewood_paley::DyadicFilterBank;
use emhd_core::model::StateAB;
use emhd_core::random::low_mode_state;
use emhd_core::wavenumber::{
    dissipation_wavenumber, wavenumber_a, wavenumber_b, MonitorSeries, WavenumberReport,
};

/// Electron MHD on the 2-torus: simulation and Littlewood-Paley diagnostics.
#[derive(Parser)]
#[command(name = "emhd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// key=value configuration file; defaults to a 64^2 grid.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed of the random initial state (overrides `init.seed`).
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Start from a snapshot instead of a random state.
    #[arg(long, value_name = "PATH")]
    init: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate to `run.t_end`, writing the energy series and final snapshot.
    Simulate(Common),
    /// Energy budget residual along a run.
    Audit(Common),
    /// Low-mode synchronization of two random solutions.
    Sync(Common),
    /// Radial cancellation and heat-decay checks.
    Radial(Common),
    /// Shell-by-shell wavenumber reports of the initial state.
    Wavenumber(Common),
    /// Low-mode monitors and the integrability functional along a run.
    Monitor(Common),
    /// Dyadic rescaling of the shell quantities by `2^scale.m`.
    ScaleCheck(Common),
}

enum Failure {
    Validation(String),
    BlowUp { t: f64, message: String },
    Other(String),
}

impl From<emhd_core::Error> for Failure {
    fn from(e: emhd_core::Error) -> Self {
        match e.abort_time() {
            Some(t) => Failure::BlowUp {
                t,
                message: e.to_string(),
            },
            None => Failure::Validation(e.to_string()),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Header(inner) => inner.into(),
            IoError::File { .. } | IoError::Csv(_) => Failure::Other(e.to_string()),
            other => Failure::Validation(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::BlowUp { t, message }) => {
            eprintln!("error: {message}");
            eprintln!("failure time: t = {t}");
            ExitCode::from(3)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Simulate(c) => simulate(&c),
        Command::Audit(c) => audit(&c),
        Command::Sync(c) => sync(&c),
        Command::Radial(c) => radial(&c),
        Command::Wavenumber(c) => wavenumber(&c),
        Command::Monitor(c) => monitor(&c),
        Command::ScaleCheck(c) => scale_check(&c),
    }
}

struct Run {
    config: RunConfig,
    out: PathBuf,
}

fn prepare(common: &Common) -> Result<Run, Failure> {
    let text = match &common.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?,
        None => "grid.n=64\n".to_string(),
    };
    let mut config = load_config(&text)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(out) = &common.out {
        config.output_dir = out.clone();
    }
    let out = config.output_dir.clone();
    std::fs::create_dir_all(&out).map_err(|e| Failure::Other(format!("{}: {e}", out.display())))?;
    std::fs::write(out.join("config.txt"), config.echo()).map_err(|e| Failure::Other(e.to_string()))?;
    Ok(Run { config, out })
}

fn initial_state(run: &Run, common: &Common) -> Result<StateAB, Failure> {
    let c = &run.config;
    match &common.init {
        Some(path) => {
            let s = read_snapshot(path)?;
            if *s.grid() != c.grid()? {
                return Err(Failure::Validation(format!(
                    "snapshot grid {}^2 does not match grid.n = {}",
                    s.grid().n(),
                    c.n
                )));
            }
            Ok(s)
        }
        None => Ok(low_mode_state(&c.grid()?, c.seed, c.init_energy, c.mu)?),
    }
}

fn csv(path: &Path, header: &[&str]) -> Result<CsvSeries, Failure> {
    Ok(CsvSeries::create(path, header)?)
}

fn energy_row(s: &Sample<'_>, e0: &mut Option<f64>) -> [f64; 5] {
    let (e, d) = emhd_core::model::energy_and_dissipation_spectral(s.state);
    let e0 = *e0.get_or_insert(e);
    [s.state.t, e, d, s.work, e - e0 + s.dissipated - s.work]
}

fn simulate(common: &Common) -> Outcome {
    let run = prepare(common)?;
    let state = initial_state(&run, common)?;
    let mut series = csv(&run.out.join("energy.csv"), ENERGY_HEADER)?;
    let mut e0 = None;
    let mut io_error = None;
    let mut hook = |s: &Sample<'_>| -> emhd_core::Result<()> {
        if let Err(e) = series.push(&energy_row(s, &mut e0)) {
            io_error.get_or_insert(e);
        }
        Ok(())
    };
    let outcome = integrate(&state, &run.config.run_settings(), &mut [&mut hook])?;
    if let Some(e) = io_error {
        return Err(e.into());
    }
    write_snapshot(run.out.join("final.snap"), &outcome.state)?;
    println!("simulate: t = {} after {} steps", outcome.state.t, outcome.steps);
    Ok(())
}

fn audit(common: &Common) -> Outcome {
    let run = prepare(common)?;
    let state = initial_state(&run, common)?;
    let ledger = run_energy_audit(&state, &run.config.run_settings())?;
    let mut series = csv(&run.out.join("energy.csv"), ENERGY_HEADER)?;
    for i in 0..ledger.len() {
        series.push(&[
            ledger.times[i],
            ledger.energy[i],
            ledger.dissipation[i],
            ledger.work[i],
            ledger.residual[i],
        ])?;
    }
    let e0 = ledger.energy.first().copied().unwrap_or(0.0);
    println!(
        "audit: steps = {}, max |residual| = {}, relative = {}",
        ledger.steps,
        fmt_value(ledger.max_abs_residual()),
        fmt_value(if e0 > 0.0 { ledger.max_abs_residual() / e0 } else { 0.0 })
    );
    Ok(())
}

fn sync(common: &Common) -> Outcome {
    let run = prepare(common)?;
    let sc = run.config.sync_config()?;
    let report = run_sync_experiment(&sc)?;
    let mut series = csv(&run.out.join("sync.csv"), SYNC_HEADER)?;
    for s in &report.samples {
        series.push(&[s.t, s.hs_norm, s.q_index.as_f64(), s.lambda_q])?;
    }
    println!(
        "sync: steps = {}, decay ratio = {}, monotone = {}, max residual = {}",
        report.steps,
        fmt_value(report.decay_ratio),
        report.monotone_after_transient,
        fmt_value(report.max_residual)
    );
    match report.abort {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

fn radial(common: &Common) -> Outcome {
    let run = prepare(common)?;
    let report = run_radial_suite(&run.config.radial_config()?)?;
    let mut series = csv(&run.out.join("radial.csv"), RADIAL_HEADER)?;
    for s in &report.history {
        series.push(&[s.t, s.j2, s.hall, s.divergence])?;
    }
    let mut heat = csv(&run.out.join("heat.csv"), HEAT_HEADER)?;
    for s in &report.heat {
        heat.push(&[s.t, s.ratio, s.expected, s.rel_err, s.leakage])?;
    }
    println!(
        "radial: max j2 = {}, max hall = {}, max div = {}, max heat error = {}",
        fmt_value(report.max_j2),
        fmt_value(report.max_hall),
        fmt_value(report.max_divergence),
        fmt_value(report.max_heat_err)
    );
    Ok(())
}

fn write_report(series: &mut CsvSeries, report: &WavenumberReport) -> Result<(), IoError> {
    let flag = |b: bool| if b { "1" } else { "0" }.to_string();
    for rec in &report.records {
        series.push_fields([
            report.kind.to_string(),
            rec.q.to_string(),
            fmt_value(rec.shell_quantity),
            rec.lowpass_linf.map_or_else(String::new, fmt_value),
            flag(rec.shell_pass),
            flag(rec.tail_pass),
            flag(rec.pass),
        ])?;
    }
    Ok(())
}

fn wavenumber(common: &Common) -> Outcome {
    let run = prepare(common)?;
    let state = initial_state(&run, common)?;
    let bank = DyadicFilterBank::new(state.grid())?;
    let params = run.config.wavenumber_params();
    let reports = [
        dissipation_wavenumber(&state, &params, &bank)?,
        wavenumber_a(&state, &params, &bank)?,
        wavenumber_b(&state, &params, &bank)?,
    ];
    let mut series = csv(&run.out.join("shells.csv"), SHELL_HEADER)?;
    for r in &reports {
        write_report(&mut series, r)?;
        println!("wavenumber {}: Q = {}, lambda_Q = {}", r.kind, r.index, fmt_value(r.lambda));
    }
    Ok(())
}

fn monitor(common: &Common) -> Outcome {
    let run = prepare(common)?;
    let state = initial_state(&run, common)?;
    let bank = DyadicFilterBank::new(state.grid())?;
    let params = run.config.wavenumber_params();
    let exponents = run.config.lps_exponents()?;
    let mut monitors = MonitorSeries::new(exponents);
    let mut series = csv(&run.out.join("monitor.csv"), MONITOR_HEADER)?;
    let mut io_error = None;
    let settings: RunSettings<'_> = run.config.run_settings();
    let mut hook = |s: &Sample<'_>| -> emhd_core::Result<()> {
        monitors.record(s.state, &bank, &params)?;
        let i = monitors.len() - 1;
        let row = [
            monitors.times[i],
            monitors.f1[i],
            monitors.f2[i],
            monitors.lr_norm_b[i],
            monitors.int_f1[i],
            monitors.int_f2[i],
            monitors.int_lps[i],
            monitors.q_a[i].as_f64(),
            monitors.q_b[i].as_f64(),
        ];
        if let Err(e) = series.push(&row) {
            io_error.get_or_insert(e);
        }
        Ok(())
    };
    let outcome = integrate(&state, &settings, &mut [&mut hook]);
    if let Some(e) = io_error {
        return Err(e.into());
    }
    outcome?;
    println!(
        "monitor: r = {}, s = {}, int ||b||^s = {}",
        exponents.r,
        exponents.s,
        fmt_value(monitors.int_lps.last().copied().unwrap_or(0.0))
    );
    Ok(())
}

fn scale_check(common: &Common) -> Outcome {
    let run = prepare(common)?;
    let state = initial_state(&run, common)?;
    let bank = DyadicFilterBank::new(state.grid())?;
    let report = run_scaling_check(&state, run.config.scale_m, run.config.diag.r, &bank)?;
    let mut series = csv(&run.out.join("scaling.csv"), SCALING_HEADER)?;
    for (kind, rows) in [("shell", &report.shells), ("lowpass", &report.lowpass)] {
        for row in rows {
            series.push_fields([
                kind.to_string(),
                row.q.to_string(),
                fmt_value(row.original),
                fmt_value(row.rescaled),
                fmt_value(row.rel_err),
            ])?;
        }
    }
    println!("scale-check: m = {}, max relative error = {}", report.m, fmt_value(report.max_rel_err));
    Ok(())
}
