//! Runnable checks built on the solver: low-mode synchronization of two
//! solutions, radial cancellations, the energy budget, and dyadic scaling of
//! the shell quantities.

mod audit;
mod radial;
mod scaling;
mod sync;

pub use audit::{run_energy_audit, EnergyLedger};
pub use radial::{
    heat_check, radial_residuals, run_radial_suite, HeatSample, RadialConfig, RadialReport, RadialSample,
    PERIODIZATION_LIMIT,
};
pub use scaling::{run_scaling_check, ScalingReport, ScalingRow};
pub use sync::{overwrite_low_modes, run_sync_experiment, run_sync_from, SyncConfig, SyncReport, SyncSample};
