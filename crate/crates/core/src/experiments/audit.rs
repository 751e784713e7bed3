use crate::integrator::{integrate, RunSettings, Sample};
use crate::model::{energy_and_dissipation_spectral, StateAB};
use crate::Result;

/// Energy budget `E(t) - E(0) + mu int D - int work` along a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EnergyLedger {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    /// Instantaneous dissipation `D(t)`.
    pub dissipation: Vec<f64>,
    /// Cumulative forcing work.
    pub work: Vec<f64>,
    /// Cumulative `mu int D`.
    pub dissipated: Vec<f64>,
    pub residual: Vec<f64>,
    pub steps: usize,
}

impl EnergyLedger {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.residual.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn final_residual(&self) -> Option<f64> {
        self.residual.last().copied()
    }

    fn push(&mut self, sample: &Sample<'_>) {
        let (e, d) = energy_and_dissipation_spectral(sample.state);
        let e0 = self.energy.first().copied().unwrap_or(e);
        self.times.push(sample.state.t);
        self.energy.push(e);
        self.dissipation.push(d);
        self.work.push(sample.work);
        self.dissipated.push(sample.dissipated);
        self.residual.push(e - e0 + sample.dissipated - sample.work);
    }
}

/// Integrates `state0` and records the energy budget on the hook cadence.
pub fn run_energy_audit(state0: &StateAB, settings: &RunSettings<'_>) -> Result<EnergyLedger> {
    let mut ledger = EnergyLedger::default();
    let mut hook = |s: &Sample<'_>| -> Result<()> {
        ledger.push(s);
        Ok(())
    };
    let outcome = integrate(state0, settings, &mut [&mut hook])?;
    ledger.steps = outcome.steps;
    Ok(ledger)
}
