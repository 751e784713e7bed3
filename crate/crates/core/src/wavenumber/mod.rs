//! Dissipation wavenumbers and low-mode regularity monitors.
//!
//! A wavenumber report scans shells `q = -1, ..., q_max` and records, for
//! each `q`, the scale-invariant shell quantity `lambda_q^{n/r} ||X_q||_{L^r}`
//! together with whether every finer shell stays below `c_r mu`. For the
//! magnetic field the low-pass `||B_{<=q}||_{L^inf}` must also stay below
//! `c_r mu`. The reported index is the smallest `q` passing every test, or
//! [`ShellIndex::Unbounded`] when no shell does.

mod monitors;
mod report;

pub use monitors::{lowmode_monitors, lps_accumulator, LowModeMonitors, LpsExponents, MonitorSeries};
pub use report::{
    dissipation_wavenumber, wavenumber_a, wavenumber_b, ShellIndex, ShellTest, WavenumberKind,
    WavenumberParams, WavenumberReport,
};
