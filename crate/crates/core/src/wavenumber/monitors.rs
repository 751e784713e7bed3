use super::report::{wavenumber_a, wavenumber_b, ShellIndex, WavenumberParams};
use crate::littlewood_paley::DyadicFilterBank;
use crate::model::StateAB;
use crate::{Error, Result};

/// `f1 = ||grad b_{<=Q(b)}||_{B^1_{inf,inf}}`, `f2 = ||grad grad a_{<=Q(a)}||_{B^1_{inf,inf}}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowModeMonitors {
    pub f1: f64,
    pub f2: f64,
    pub q_a: ShellIndex,
    pub q_b: ShellIndex,
}

/// Evaluates `f1` and `f2`, taking the maximum over derivative components.
///
/// `pinned = Some((q_a, q_b))` skips the wavenumber computation and uses the
/// given low-pass levels instead.
pub fn lowmode_monitors(
    state: &StateAB,
    bank: &DyadicFilterBank,
    params: &WavenumberParams,
    pinned: Option<(ShellIndex, ShellIndex)>,
) -> Result<LowModeMonitors> {
    if *state.grid() != *bank.grid() {
        return Err(Error::GridMismatch);
    }
    let (q_a, q_b) = match pinned {
        Some(p) => p,
        None => (
            wavenumber_a(state, params, bank)?.index,
            wavenumber_b(state, params, bank)?.index,
        ),
    };
    let b_low = bank.lowpass(&state.b, q_b.lowpass_level(bank));
    let f1 = [b_low.dx(), b_low.dy()]
        .iter()
        .map(|c| bank.besov_b1inf_norm(c))
        .fold(0.0, f64::max);
    let a_low = bank.lowpass(&state.a, q_a.lowpass_level(bank));
    // the two mixed derivatives coincide
    let f2 = [(2, 0), (1, 1), (0, 2)]
        .iter()
        .map(|&(m1, m2)| bank.besov_b1inf_norm(&a_low.derivative_unchecked(m1, m2)))
        .fold(0.0, f64::max);
    Ok(LowModeMonitors { f1, f2, q_a, q_b })
}

/// Space-time exponents `(r, s)` of the integrability criterion `2/s + 2/r <= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpsExponents {
    pub r: f64,
    pub s: f64,
}

impl LpsExponents {
    /// `r` in `(2, inf]`; `s` defaults to the critical `2r / (r - 2)`.
    pub fn new(r: f64, s: Option<f64>) -> Result<Self> {
        if r.is_nan() || r <= 2.0 {
            return Err(Error::param("r", format!("must lie in (2, inf], got {r}")));
        }
        let critical = if r.is_infinite() { 2.0 } else { 2.0 * r / (r - 2.0) };
        let s = s.unwrap_or(critical);
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::param("s", format!("must be positive and finite, got {s}")));
        }
        if 2.0 / s + 2.0 / r > 1.0 + 1e-12 {
            return Err(Error::ExponentCriterion { r, s });
        }
        Ok(Self { r, s })
    }
}

/// Monitor time series with trapezoidal running integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorSeries {
    pub exponents: LpsExponents,
    pub times: Vec<f64>,
    pub f1: Vec<f64>,
    pub f2: Vec<f64>,
    pub lr_norm_b: Vec<f64>,
    pub int_f1: Vec<f64>,
    pub int_f2: Vec<f64>,
    /// Running `int ||b||_{L^r}^s dt`.
    pub int_lps: Vec<f64>,
    pub q_a: Vec<ShellIndex>,
    pub q_b: Vec<ShellIndex>,
}

impl MonitorSeries {
    pub fn new(exponents: LpsExponents) -> Self {
        Self {
            exponents,
            times: Vec::new(),
            f1: Vec::new(),
            f2: Vec::new(),
            lr_norm_b: Vec::new(),
            int_f1: Vec::new(),
            int_f2: Vec::new(),
            int_lps: Vec::new(),
            q_a: Vec::new(),
            q_b: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Appends one sample; times must not decrease.
    pub fn push(&mut self, t: f64, monitors: LowModeMonitors, lr_norm_b: f64) -> Result<()> {
        if !t.is_finite() {
            return Err(Error::param("t", "non-finite sample time"));
        }
        let s = self.exponents.s;
        let (i1, i2, il) = match self.times.last() {
            None => (0.0, 0.0, 0.0),
            Some(&t0) => {
                if t < t0 {
                    return Err(Error::param("t", format!("sample time {t} precedes {t0}")));
                }
                let h = 0.5 * (t - t0);
                let k = self.len() - 1;
                (
                    self.int_f1[k] + h * (self.f1[k] + monitors.f1),
                    self.int_f2[k] + h * (self.f2[k] + monitors.f2),
                    self.int_lps[k] + h * (self.lr_norm_b[k].powf(s) + lr_norm_b.powf(s)),
                )
            }
        };
        self.times.push(t);
        self.f1.push(monitors.f1);
        self.f2.push(monitors.f2);
        self.lr_norm_b.push(lr_norm_b);
        self.int_f1.push(i1);
        self.int_f2.push(i2);
        self.int_lps.push(il);
        self.q_a.push(monitors.q_a);
        self.q_b.push(monitors.q_b);
        Ok(())
    }

    /// Computes monitors and `||b||_{L^r}` for `state` and appends them.
    pub fn record(&mut self, state: &StateAB, bank: &DyadicFilterBank, params: &WavenumberParams) -> Result<()> {
        let monitors = lowmode_monitors(state, bank, params, None)?;
        let lr = state.b.lebesgue_norm(self.exponents.r)?;
        self.push(state.t, monitors, lr)
    }

    /// Growth of `int ||b||^s` over the last `fraction` of the recorded window,
    /// relative to the total: near 0 for a settling integral, near `fraction`
    /// for steady growth, larger when the integrand is increasing.
    pub fn lps_growth(&self, fraction: f64) -> Option<f64> {
        let (&t_end, &total) = (self.times.last()?, self.int_lps.last()?);
        let t0 = self.times[0];
        if total <= 0.0 || t_end <= t0 {
            return None;
        }
        let cut = t_end - fraction.clamp(0.0, 1.0) * (t_end - t0);
        let i = self.times.partition_point(|&t| t < cut).min(self.len() - 1);
        Some((total - self.int_lps[i]) / total)
    }
}

/// Runs the monitors over a sequence of `(t, state)` samples; each state's own
/// time tag is replaced by the given `t`.
pub fn lps_accumulator<'a>(
    samples: impl IntoIterator<Item = (f64, &'a StateAB)>,
    bank: &DyadicFilterBank,
    params: &WavenumberParams,
    exponents: LpsExponents,
) -> Result<MonitorSeries> {
    let mut series = MonitorSeries::new(exponents);
    for (t, state) in samples {
        let monitors = lowmode_monitors(state, bank, params, None)?;
        series.push(t, monitors, state.b.lebesgue_norm(exponents.r)?)?;
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::spectral::{ScalarField, TorusGrid};

    fn setup(n: usize) -> (TorusGrid, DyadicFilterBank) {
        let g = TorusGrid::unit(n).unwrap();
        let bank = DyadicFilterBank::new(&g).unwrap();
        (g, bank)
    }

    #[test]
    fn zero_state_monitors_vanish() {
        let (g, bank) = setup(32);
        let s = StateAB::zeros(&g, 0.1).unwrap();
        let m = lowmode_monitors(&s, &bank, &WavenumberParams::default(), None).unwrap();
        assert_eq!((m.f1, m.f2), (0.0, 0.0));
        assert_eq!(m.q_b, ShellIndex::Finite(-1));
    }

    #[test]
    fn lowest_lowpass_excludes_unit_mode() {
        let (g, bank) = setup(32);
        let b = ScalarField::from_fn(&g, |x, _| (2.0 * PI * x).cos()).unwrap();
        let s = StateAB::new(ScalarField::zeros(&g), b, 0.0, 0.1).unwrap();
        let params = WavenumberParams::new(3.0, 1e3);
        let m = lowmode_monitors(&s, &bank, &params, None).unwrap();
        assert_eq!(m.q_b, ShellIndex::Finite(-1));
        assert!(m.f1 < 1e-14);
    }

    #[test]
    fn monitors_are_homogeneous_at_pinned_index() {
        let (g, bank) = setup(32);
        let a = ScalarField::from_fn(&g, |x, y| (2.0 * PI * (x + 2.0 * y)).sin()).unwrap();
        let b = ScalarField::from_fn(&g, |x, y| (2.0 * PI * (3.0 * x - y)).cos()).unwrap();
        let s = StateAB::new(a, b, 0.0, 0.1).unwrap();
        let pin = Some((ShellIndex::Finite(2), ShellIndex::Unbounded));
        let p = WavenumberParams::default();
        let m1 = lowmode_monitors(&s, &bank, &p, pin).unwrap();
        let m3 = lowmode_monitors(&s.scaled(3.0), &bank, &p, pin).unwrap();
        assert!(m1.f1 > 0.0 && m1.f2 > 0.0);
        assert!((m3.f1 / m1.f1 - 3.0).abs() < 1e-12);
        assert!((m3.f2 / m1.f2 - 3.0).abs() < 1e-12);
    }

    #[test]
    fn exponent_criterion() {
        assert!(LpsExponents::new(4.0, Some(4.0)).is_ok());
        assert!(matches!(
            LpsExponents::new(4.0, Some(3.0)),
            Err(Error::ExponentCriterion { .. })
        ));
        assert_eq!(LpsExponents::new(3.0, None).unwrap().s, 6.0);
        assert_eq!(LpsExponents::new(f64::INFINITY, None).unwrap().s, 2.0);
        assert!(LpsExponents::new(2.0, None).is_err());
    }

    #[test]
    fn heat_decay_integral() {
        let (g, bank) = setup(16);
        let mu = 0.1;
        let rate = mu * (2.0 * PI).powi(2);
        let t_end = 1.0;
        let steps = 4000;
        let states: Vec<(f64, StateAB)> = (0..=steps)
            .map(|i| {
                let t = t_end * i as f64 / steps as f64;
                let b = ScalarField::from_fn(&g, |_, y| (-rate * t).exp() * (2.0 * PI * y).cos()).unwrap();
                (t, StateAB::new(ScalarField::zeros(&g), b, t, mu).unwrap())
            })
            .collect();
        let ex = LpsExponents::new(f64::INFINITY, Some(2.0)).unwrap();
        let series = lps_accumulator(states.iter().map(|(t, s)| (*t, s)), &bank, &WavenumberParams::default(), ex)
            .unwrap();
        let exact = (1.0 - (-2.0 * rate * t_end).exp()) / (2.0 * rate);
        let got = *series.int_lps.last().unwrap();
        // trapezoid error ~ h^2 (2 rate)^2 / 12 relative
        assert!((got / exact - 1.0).abs() < 1e-6, "{got} vs {exact}");
        assert!(series.int_lps.windows(2).all(|w| w[1] >= w[0]));
        assert!(series.lps_growth(0.1).unwrap() < 0.01);
    }

    #[test]
    fn zero_b_integral_is_zero() {
        let (g, bank) = setup(16);
        let s = StateAB::zeros(&g, 0.1).unwrap();
        let ex = LpsExponents::new(4.0, None).unwrap();
        let series = lps_accumulator([(0.0, &s), (0.5, &s), (1.0, &s)], &bank, &WavenumberParams::default(), ex)
            .unwrap();
        assert_eq!(series.int_lps, vec![0.0; 3]);
    }

    #[test]
    fn rejects_decreasing_time() {
        let mut series = MonitorSeries::new(LpsExponents::new(4.0, None).unwrap());
        let m = LowModeMonitors {
            f1: 0.0,
            f2: 0.0,
            q_a: ShellIndex::Finite(-1),
            q_b: ShellIndex::Finite(-1),
        };
        series.push(1.0, m, 0.0).unwrap();
        assert!(series.push(0.5, m, 0.0).is_err());
    }
}
