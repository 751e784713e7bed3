use std::fmt;

use crate::littlewood_paley::{DyadicFilterBank, Q_MIN};
use crate::model::StateAB;
use crate::spectral::{magnitude, ScalarField};
use crate::{Error, Result};

/// Which quantity a report was computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavenumberKind {
    /// The full field `B`, with the additional low-pass `L^inf` clause.
    MagneticField,
    /// The in-plane field `curl(a e_z) = (a_y, -a_x)`.
    PotentialA,
    /// The vertical component `b`.
    VerticalB,
}

impl fmt::Display for WavenumberKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WavenumberKind::MagneticField => "B",
            WavenumberKind::PotentialA => "a",
            WavenumberKind::VerticalB => "b",
        })
    }
}

/// A shell index `q >= -1`, or the sentinel for an empty defining set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ShellIndex {
    Finite(i32),
    Unbounded,
}

impl ShellIndex {
    pub fn finite(self) -> Option<i32> {
        match self {
            ShellIndex::Finite(q) => Some(q),
            ShellIndex::Unbounded => None,
        }
    }

    /// `q` as a float, `+inf` for the sentinel.
    pub fn as_f64(self) -> f64 {
        self.finite().map_or(f64::INFINITY, f64::from)
    }

    /// `2^q / L`, `+inf` for the sentinel.
    pub fn lambda(self, period: f64) -> f64 {
        self.finite().map_or(f64::INFINITY, |q| 2f64.powi(q) / period)
    }

    /// Low-pass level to use for this index: the whole retained field when unbounded.
    pub fn lowpass_level(self, bank: &DyadicFilterBank) -> i32 {
        self.finite().unwrap_or(bank.q_max())
    }
}

impl fmt::Display for ShellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShellIndex::Finite(q) => write!(f, "{q}"),
            ShellIndex::Unbounded => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavenumberParams {
    pub r: f64,
    pub c_r: f64,
    /// Spatial dimension entering `lambda^{n/r}`; 2 for field data.
    pub n: f64,
}

impl Default for WavenumberParams {
    fn default() -> Self {
        Self {
            r: 3.0,
            c_r: 0.01,
            n: 2.0,
        }
    }
}

impl WavenumberParams {
    pub fn new(r: f64, c_r: f64) -> Self {
        Self { r, c_r, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.c_r.is_finite() && self.c_r > 0.0) {
            return Err(Error::param("c_r", format!("must be positive, got {}", self.c_r)));
        }
        if !(self.n.is_finite() && self.n > 0.0) {
            return Err(Error::param("n", format!("must be positive, got {}", self.n)));
        }
        if !(self.r >= 1.0) {
            return Err(Error::param("r", format!("must be >= 1, got {}", self.r)));
        }
        Ok(())
    }
}

/// Both tests evaluated at one shell index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellTest {
    pub q: i32,
    /// `lambda_q^{n/r} ||X_q||_{L^r}`.
    pub shell_quantity: f64,
    pub shell_pass: bool,
    /// Every `p > q` passes its shell test.
    pub tail_pass: bool,
    /// `||X_{<=q}||_{L^inf}`; only evaluated for the magnetic field.
    pub lowpass_linf: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavenumberReport {
    pub kind: WavenumberKind,
    pub index: ShellIndex,
    /// `2^Q / L`, or `+inf`.
    pub lambda: f64,
    pub r: f64,
    pub c_r: f64,
    pub mu: f64,
    pub n: f64,
    pub records: Vec<ShellTest>,
}

impl WavenumberReport {
    pub fn threshold(&self) -> f64 {
        self.c_r * self.mu
    }

    pub fn record(&self, q: i32) -> Option<&ShellTest> {
        usize::try_from(q - Q_MIN).ok().and_then(|i| self.records.get(i))
    }

    /// The index passes, every smaller index fails, and `lambda` matches.
    pub fn is_minimal(&self, period: f64) -> bool {
        let consistent = match self.index {
            ShellIndex::Finite(q) => {
                self.record(q).is_some_and(|r| r.pass)
                    && self.records.iter().filter(|r| r.q < q).all(|r| !r.pass)
            }
            ShellIndex::Unbounded => self.records.iter().all(|r| !r.pass),
        };
        let lambda = self.index.lambda(period);
        consistent && (lambda == self.lambda || (lambda - self.lambda).abs() <= 1e-15 * lambda)
    }
}

/// Dissipation wavenumber of `B = (a_y, -a_x, b)`.
///
/// The theory uses `r` in `(n, 2n)`; other values are evaluated with a warning.
pub fn dissipation_wavenumber(
    state: &StateAB,
    params: &WavenumberParams,
    bank: &DyadicFilterBank,
) -> Result<WavenumberReport> {
    params.validate()?;
    if !(params.r > params.n && params.r < 2.0 * params.n) {
        log::warn!(
            "r = {} outside ({}, {}); wavenumber of B evaluated anyway",
            params.r,
            params.n,
            2.0 * params.n
        );
    }
    let field = state.magnetic_field();
    scan(
        WavenumberKind::MagneticField,
        state,
        &field.as_refs(),
        params,
        bank,
        true,
    )
}

/// Wavenumber of the in-plane field `curl(a e_z)`; requires `r` in `[2, inf)`.
pub fn wavenumber_a(
    state: &StateAB,
    params: &WavenumberParams,
    bank: &DyadicFilterBank,
) -> Result<WavenumberReport> {
    check_planar_r(params)?;
    let (ay, ax) = (state.a.dy(), state.a.dx().scale(-1.0));
    scan(WavenumberKind::PotentialA, state, &[&ay, &ax], params, bank, false)
}

/// Wavenumber of `b`; requires `r` in `[2, inf)`.
pub fn wavenumber_b(
    state: &StateAB,
    params: &WavenumberParams,
    bank: &DyadicFilterBank,
) -> Result<WavenumberReport> {
    check_planar_r(params)?;
    scan(WavenumberKind::VerticalB, state, &[&state.b], params, bank, false)
}

fn check_planar_r(params: &WavenumberParams) -> Result<()> {
    params.validate()?;
    if !(params.r >= 2.0 && params.r.is_finite()) {
        return Err(Error::param("r", format!("must lie in [2, inf), got {}", params.r)));
    }
    Ok(())
}

fn scan(
    kind: WavenumberKind,
    state: &StateAB,
    components: &[&ScalarField],
    params: &WavenumberParams,
    bank: &DyadicFilterBank,
    with_linf: bool,
) -> Result<WavenumberReport> {
    if *state.grid() != *bank.grid() {
        return Err(Error::GridMismatch);
    }
    let threshold = params.c_r * state.mu;
    let spectrum = bank.shell_spectrum_vector(components, params.r)?;
    let quantities: Vec<f64> = spectrum
        .entries
        .iter()
        .map(|e| bank.lambda(e.q).powf(params.n / params.r) * e.lr)
        .collect();

    let mut records = Vec::with_capacity(quantities.len());
    let mut tail_pass = true;
    for (i, &quantity) in quantities.iter().enumerate().rev() {
        let q = i as i32 + Q_MIN;
        let shell_pass = quantity < threshold;
        let lowpass_linf = with_linf.then(|| {
            let parts: Vec<ScalarField> = components.iter().map(|c| bank.lowpass(c, q)).collect();
            magnitude(&parts.iter().collect::<Vec<_>>())
                .into_iter()
                .fold(0.0, f64::max)
        });
        let pass = tail_pass && lowpass_linf.is_none_or(|v| v < threshold);
        records.push(ShellTest {
            q,
            shell_quantity: quantity,
            shell_pass,
            tail_pass,
            lowpass_linf,
            pass,
        });
        tail_pass &= shell_pass;
    }
    records.reverse();

    let index = records
        .iter()
        .find(|r| r.pass)
        .map_or(ShellIndex::Unbounded, |r| ShellIndex::Finite(r.q));
    Ok(WavenumberReport {
        kind,
        index,
        lambda: index.lambda(bank.grid().period()),
        r: params.r,
        c_r: params.c_r,
        mu: state.mu,
        n: params.n,
        records,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::model::rescale;
    use crate::spectral::TorusGrid;

    fn setup(n: usize) -> (TorusGrid, DyadicFilterBank) {
        let g = TorusGrid::unit(n).unwrap();
        let bank = DyadicFilterBank::new(&g).unwrap();
        (g, bank)
    }

    /// `amp * cos(2 pi k x)` as the vertical component.
    fn b_mode(g: &TorusGrid, k: f64, amp: f64, mu: f64) -> StateAB {
        let b = ScalarField::from_fn(g, |x, _| amp * (2.0 * PI * k * x).cos()).unwrap();
        StateAB::new(ScalarField::zeros(g), b, 0.0, mu).unwrap()
    }

    /// `(mean |cos|^r)^{1/r}`.
    fn cos_lr_factor(r: f64) -> f64 {
        let m = 4096;
        let s: f64 = (0..m)
            .map(|i| (2.0 * PI * i as f64 / m as f64).cos().abs().powf(r))
            .sum();
        (s / m as f64).powf(1.0 / r)
    }

    #[test]
    fn zero_field_has_lowest_index() {
        let (g, bank) = setup(32);
        let s = StateAB::zeros(&g, 0.1).unwrap();
        let p = WavenumberParams::default();
        for rep in [
            dissipation_wavenumber(&s, &p, &bank).unwrap(),
            wavenumber_a(&s, &p, &bank).unwrap(),
            wavenumber_b(&s, &p, &bank).unwrap(),
        ] {
            assert_eq!(rep.index, ShellIndex::Finite(-1));
            assert_eq!(rep.lambda, 0.5);
            assert!(rep.is_minimal(1.0));
        }
    }

    #[test]
    fn single_shell_three_mode() {
        let (g, bank) = setup(32);
        let p = WavenumberParams::default();
        let mu = 0.1;
        let thr = p.c_r * mu;
        // lambda_3^{2/3} ||b||_{L^3} = 2 thr
        let unit = b_mode(&g, 8.0, 1.0, mu).b.lebesgue_norm(3.0).unwrap();
        let amp = 2.0 * thr / (8f64.powf(2.0 / 3.0) * unit);
        assert!(amp < thr);
        let s = b_mode(&g, 8.0, amp, mu);
        let rep = dissipation_wavenumber(&s, &p, &bank).unwrap();
        assert_eq!(rep.index, ShellIndex::Finite(3));
        assert_eq!(rep.lambda, 8.0);
        assert!((rep.record(3).unwrap().shell_quantity / (2.0 * thr) - 1.0).abs() < 1e-10);
        assert!(rep.is_minimal(1.0));
        let rb = wavenumber_b(&s, &p, &bank).unwrap();
        assert_eq!(rb.index, ShellIndex::Finite(3));
    }

    #[test]
    fn large_field_is_unbounded() {
        let (g, bank) = setup(32);
        let s = b_mode(&g, 8.0, 5.0, 0.1);
        let rep = dissipation_wavenumber(&s, &WavenumberParams::default(), &bank).unwrap();
        assert_eq!(rep.index, ShellIndex::Unbounded);
        assert_eq!(rep.lambda, f64::INFINITY);
        assert!(rep.is_minimal(1.0));
        // the b report has no low-pass clause and stops at the top shell
        let rb = wavenumber_b(&s, &WavenumberParams::default(), &bank).unwrap();
        assert_eq!(rb.index, ShellIndex::Finite(3));
    }

    #[test]
    fn potential_report_uses_curl() {
        let (g, bank) = setup(32);
        // a = A sin(2 pi 4 y): curl(a e_z) = (a_y, 0), |a_y| = 8 pi A |cos|
        let amp = 1e-4;
        let a = ScalarField::from_fn(&g, |_, y| amp * (8.0 * PI * y).sin()).unwrap();
        let s = StateAB::new(a, ScalarField::zeros(&g), 0.0, 0.1).unwrap();
        let p = WavenumberParams::new(2.0, 0.01);
        let rep = wavenumber_a(&s, &p, &bank).unwrap();
        let expected = 4.0 * 8.0 * PI * amp * cos_lr_factor(2.0);
        assert!((rep.record(2).unwrap().shell_quantity / expected - 1.0).abs() < 1e-12);
        assert_eq!(rep.index, ShellIndex::Finite(2));
    }

    #[test]
    fn rescaling_shifts_b_index_by_one() {
        let (g, bank) = setup(64);
        let p = WavenumberParams::default();
        let thr = p.c_r * 0.1;
        let amp = 2.0 * thr / (4f64.powf(2.0 / 3.0) * cos_lr_factor(3.0));
        let s = b_mode(&g, 4.0, amp, 0.1);
        let q0 = wavenumber_b(&s, &p, &bank).unwrap().index;
        let q1 = wavenumber_b(&rescale(&s, 1).unwrap(), &p, &bank).unwrap().index;
        assert_eq!(q0, ShellIndex::Finite(2));
        assert_eq!(q1, ShellIndex::Finite(3));
    }

    #[test]
    fn rejects_bad_parameters() {
        let (g, bank) = setup(16);
        let s = StateAB::zeros(&g, 0.1).unwrap();
        assert!(wavenumber_b(&s, &WavenumberParams::new(1.5, 0.01), &bank).is_err());
        assert!(wavenumber_a(&s, &WavenumberParams::new(f64::INFINITY, 0.01), &bank).is_err());
        assert!(dissipation_wavenumber(&s, &WavenumberParams::new(3.0, 0.0), &bank).is_err());
        // outside (n, 2n) is only a warning
        assert!(dissipation_wavenumber(&s, &WavenumberParams::new(6.0, 0.01), &bank).is_ok());
    }

    #[test]
    fn index_ordering_and_display() {
        assert!(ShellIndex::Finite(40) < ShellIndex::Unbounded);
        assert!(ShellIndex::Finite(-1) < ShellIndex::Finite(0));
        assert_eq!(ShellIndex::Unbounded.to_string(), "inf");
        assert_eq!(ShellIndex::Finite(-1).to_string(), "-1");
        assert_eq!(ShellIndex::Finite(3).lambda(2.0), 4.0);
    }
}
