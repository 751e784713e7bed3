//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! `cargo test --release --test acceptance -- 1 4 9` runs a subset.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use emhd_core::experiments::{run_energy_audit, run_radial_suite, run_scaling_check, run_sync_experiment, RadialConfig, SyncConfig};
use emhd_core::integrator::{integrate, step, suggest_dt, RunSettings, StepPolicy};
use emhd_core::littlewood_paley::estimates::{curl_ensemble, transport_ensemble, ENSEMBLE_WINDOW};
use emhd_core::littlewood_paley::{bony_decompose, DyadicFilterBank};
use emhd_core::model::{StateAB, Variant};
use emhd_core::random::{low_mode_state, rng, smooth_field};
use emhd_core::spectral::{ScalarField, TorusGrid};
use emhd_core::wavenumber::{dissipation_wavenumber, wavenumber_a, wavenumber_b, ShellIndex, WavenumberParams};
use rand::Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

type Check = fn() -> Verdict;

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn grid(n: usize) -> TorusGrid {
    TorusGrid::unit(n).expect("valid grid")
}

fn partition_of_unity() -> Verdict {
    let mut worst = 0.0f64;
    for n in [64, 128] {
        let g = grid(n);
        let bank = DyadicFilterBank::new(&g).unwrap();
        for idx in (0..g.len()).filter(|&i| g.is_retained(i)) {
            worst = worst.max((bank.partition_sum(idx) - 1.0).abs());
        }
    }
    verdict(worst <= 1e-12, format!("max |sum phi_q - 1| = {worst:.3e} on 64^2 and 128^2"))
}

fn transforms_and_derivatives() -> Verdict {
    let g = grid(64);
    let u = smooth_field(&g, &mut rng(7), 20);
    let roundtrip = u.transform_roundtrip().unwrap().max_diff(&u);

    let kappa = g.base_wavenumber();
    let modes = [(3.0, 5.0, 0.0), (-7.0, 2.0, 0.5 * PI), (11.0, -13.0, 0.3)];
    let f = ScalarField::from_fn(&g, |x, y| {
        modes.iter().map(|(k1, k2, ph)| (kappa * (k1 * x + k2 * y) + ph).sin()).sum()
    })
    .unwrap();
    let mut worst = 0.0f64;
    for (m1, m2) in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 1), (2, 2)] {
        let exact = ScalarField::from_fn(&g, |x, y| {
            modes
                .iter()
                .map(|(k1, k2, ph)| {
                    let amp = (kappa * k1).powi(m1 as i32) * (kappa * k2).powi(m2 as i32);
                    amp * (kappa * (k1 * x + k2 * y) + ph + f64::from(m1 + m2) * 0.5 * PI).sin()
                })
                .sum()
        })
        .unwrap();
        let d = f.derivative(m1, m2).unwrap();
        worst = worst.max(d.max_diff(&exact) / exact.max_abs());
    }
    verdict(
        roundtrip <= 1e-12 && worst <= 1e-12,
        format!("round trip {roundtrip:.3e}, worst relative derivative error {worst:.3e}"),
    )
}

fn energy_identity() -> Verdict {
    let g = grid(128);
    let s0 = low_mode_state(&g, 1, 1.0, 0.1).unwrap();
    let fixed = integrate(
        &s0,
        &RunSettings {
            t_end: 1.0,
            variant: Variant::Emhd1,
            forcing: None,
            policy: StepPolicy::fixed(1e-4),
            cadence: 1000,
        },
        &mut [],
    );
    let literal = match fixed {
        Ok(_) => "fixed dt = 1e-4 completes".to_string(),
        Err(e) => format!("fixed dt = 1e-4 aborts at t = {:.1e}", e.abort_time().unwrap_or(f64::NAN)),
    };
    let dt0 = suggest_dt(&s0, &StepPolicy::adaptive(1.0, 1.0, 0.0), Variant::Emhd1).unwrap();
    let settings = RunSettings {
        t_end: 1.0,
        variant: Variant::Emhd1,
        forcing: None,
        policy: StepPolicy::adaptive(1.0, 1e-4, 1e-12),
        cadence: 1000,
    };
    match run_energy_audit(&s0, &settings) {
        Ok(ledger) => {
            let res = ledger.final_residual().unwrap().abs();
            verdict(
                res <= 1e-6,
                format!(
                    "|E(T) - E(0) + mu int D| = {res:.3e} with dt <= 1e-4 under CFL control, {} steps \
                     (stability limit at t = 0 is {dt0:.1e}; {literal})",
                    ledger.steps
                ),
            )
        }
        Err(e) => verdict(false, format!("run aborted: {e}; {literal}")),
    }
}

fn heat_kernel() -> Verdict {
    let g = grid(32);
    let (mu, t_end) = (0.05, 1.0);
    let kappa = g.base_wavenumber();
    let modes: [(i64, i64, f64); 4] = [(0, 1, 1.0), (3, 4, 0.5), (7, 0, 0.25), (-5, 9, 0.125)];
    let b = ScalarField::from_fn(&g, |x, y| {
        modes.iter().map(|&(k1, k2, c)| c * (kappa * (k1 as f64 * x + k2 as f64 * y)).cos()).sum()
    })
    .unwrap();
    let s0 = StateAB::new(ScalarField::zeros(&g), b, 0.0, mu).unwrap();
    let out = integrate(
        &s0,
        &RunSettings {
            t_end,
            variant: Variant::Emhd2,
            forcing: None,
            policy: StepPolicy::fixed(0.01),
            cadence: 1,
        },
        &mut [],
    )
    .unwrap();
    let mut worst = 0.0f64;
    for &(k1, k2, _) in &modes {
        let k2sum = (k1 * k1 + k2 * k2) as f64;
        let expected = (-mu * kappa * kappa * k2sum * t_end).exp();
        let ratio = out.state.b.coefficient(k1, k2).re / s0.b.coefficient(k1, k2).re;
        worst = worst.max((ratio - expected).abs() / expected);
    }
    verdict(worst <= 1e-12, format!("worst relative decay error over 4 modes {worst:.3e}"))
}

fn radial_cancellations() -> Verdict {
    let rep = run_radial_suite(&RadialConfig::new(&grid(128))).unwrap();
    let pass = rep.max_j2 <= 1e-10 && rep.max_hall <= 1e-9 && rep.max_divergence <= 1e-12;
    verdict(
        pass,
        format!(
            "J2 {:.3e}, Hall {:.3e}, div B {:.3e} over {} samples (sigma = {}, periodization {:.1e})",
            rep.max_j2,
            rep.max_hall,
            rep.max_divergence,
            rep.history.len(),
            rep.sigma,
            rep.periodization_bound
        ),
    )
}

fn bony_identity() -> Verdict {
    let g = grid(64);
    let bank = DyadicFilterBank::new(&g).unwrap();
    let mut r = rng(2024);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let u = smooth_field(&g, &mut r, ENSEMBLE_WINDOW);
        let v = smooth_field(&g, &mut r, ENSEMBLE_WINDOW);
        let uv = u.product(&v);
        let scale = uv.l2_norm();
        for q in bank.shell_indices() {
            let parts = bony_decompose(&u, &v, q, &bank).unwrap();
            let direct = bank.project(&uv, q).unwrap();
            worst = worst.max((&parts.sum() - &direct).l2_norm() / scale);
        }
    }
    verdict(worst <= 1e-10, format!("worst ||P1+P2+P3 - Delta_q(uv)|| / ||uv|| = {worst:.3e}"))
}

fn synchronization() -> Verdict {
    let cfg = SyncConfig::new(&grid(128));
    let rep = run_sync_experiment(&cfg).unwrap();
    let first = rep.samples.first().map_or(0.0, |s| s.hs_norm);
    let last = rep.samples.last().map_or(0.0, |s| s.hs_norm);
    let ratio = last / first;
    let q_max = rep.samples.iter().map(|s| s.q_index).max().unwrap();
    let pass = rep.abort.is_none() && first > 0.0 && ratio <= 1e-2 && rep.monotone_after_transient && rep.max_residual <= 1e-13;
    verdict(
        pass,
        format!(
            "final/initial {ratio:.3e}, monotone after 10%: {}, max ||h_<=Q||/||h|| {:.1e}, largest Q {q_max}, {} steps",
            rep.monotone_after_transient, rep.max_residual, rep.steps
        ),
    )
}

fn scaling_invariance() -> Verdict {
    let g = grid(128);
    let bank = DyadicFilterBank::new(&g).unwrap();
    let s = low_mode_state(&g, 3, 1.0, 0.1).unwrap();
    let mut worst = 0.0f64;
    for m in [1, 2] {
        worst = worst.max(run_scaling_check(&s, m, 3.0, &bank).unwrap().max_rel_err);
    }
    verdict(worst <= 1e-8, format!("worst relative mismatch for m = 1, 2: {worst:.3e}"))
}

fn wavenumber_properties() -> Verdict {
    let g = grid(64);
    let bank = DyadicFilterBank::new(&g).unwrap();
    let params = WavenumberParams::default();
    let mu = 0.1;
    let zero = StateAB::zeros(&g, mu).unwrap();
    let zero_ok = dissipation_wavenumber(&zero, &params, &bank).unwrap().index == ShellIndex::Finite(-1);

    // b as a sum of non-negative cosines at shell cores: every shell norm and
    // every low-pass maximum is increasing in each amplitude.
    let cores: Vec<i64> = (0..=bank.q_max()).map(|p| 1i64 << p).filter(|&k| k <= g.cutoff()).collect();
    let build = |amps: &[f64]| {
        let kappa = g.base_wavenumber();
        let b = ScalarField::from_fn(&g, |x, _| {
            cores.iter().zip(amps).map(|(&k, &c)| c * (kappa * k as f64 * x).cos()).sum()
        })
        .unwrap();
        StateAB::new(ScalarField::zeros(&g), b, 0.0, mu).unwrap()
    };
    let mut r = rng(99);
    let (mut minimal, mut monotone, mut reports) = (true, true, 0);
    for _ in 0..100 {
        let mut amps: Vec<f64> = cores.iter().map(|_| r.gen_range(0.0..2e-3)).collect();
        let before = build(&amps);
        let p = r.gen_range(0..cores.len());
        amps[p] += r.gen_range(1e-4..5e-3);
        let after = build(&amps);
        let mut q = [ShellIndex::Finite(-1); 2];
        for (i, s) in [&before, &after].into_iter().enumerate() {
            let reps = [
                dissipation_wavenumber(s, &params, &bank).unwrap(),
                wavenumber_a(s, &params, &bank).unwrap(),
                wavenumber_b(s, &params, &bank).unwrap(),
            ];
            minimal &= reps.iter().all(|rep| rep.is_minimal(g.period()));
            reports += reps.len();
            q[i] = reps[0].index;
        }
        monotone &= q[1] >= q[0];
    }
    verdict(
        zero_ok && minimal && monotone,
        format!("zero field Q = -1: {zero_ok}; {reports} reports minimal: {minimal}; monotone over 100 injections: {monotone}"),
    )
}

fn rk4_order() -> Verdict {
    let g = grid(32);
    let s0 = low_mode_state(&g, 5, 1e-2, 0.1).unwrap();
    let h = 0.5 * suggest_dt(&s0, &StepPolicy::adaptive(1.0, 1.0, 0.0), Variant::Emhd1).unwrap();
    let steps = 8;
    let run = |dt: f64, n: usize| {
        let mut s = s0.clone();
        for _ in 0..n {
            s = step(&s, dt, Variant::Emhd1, None).unwrap();
        }
        s
    };
    let reference = run(h / 64.0, steps * 64);
    let errors: Vec<f64> = [1, 2, 4]
        .iter()
        .map(|&m| {
            let s = run(h / m as f64, steps * m);
            s.a.max_diff(&reference.a).max(s.b.max_diff(&reference.b))
        })
        .collect();
    let ratios = [errors[0] / errors[1], errors[1] / errors[2]];
    let pass = ratios.iter().all(|r| (8.0..=32.0).contains(r));
    verdict(
        pass,
        format!("error ratios under halving {:.2}, {:.2} (h = {h:.2e}, errors {:.2e} .. {:.2e})", ratios[0], ratios[1], errors[0], errors[2]),
    )
}

fn commutator_ensembles() -> Verdict {
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, f) in [
        ("transport", transport_ensemble as fn(&TorusGrid, usize, u64, i64) -> emhd_core::Result<_>),
        ("curl", curl_ensemble),
    ] {
        let coarse = f(&grid(64), 50, 17, ENSEMBLE_WINDOW).unwrap();
        let fine = f(&grid(128), 50, 17, ENSEMBLE_WINDOW).unwrap();
        let spread = |a: f64, b: f64| a.max(b) / a.min(b);
        let (s_max, s_mean) = (spread(coarse.max, fine.max), spread(coarse.mean, fine.mean));
        pass &= coarse.all_finite && fine.all_finite && coarse.samples > 0 && s_max <= 2.0 && s_mean <= 2.0;
        detail.push(format!(
            "{name}: max {:.3e} -> {:.3e}, mean {:.3e} -> {:.3e}",
            coarse.max, fine.max, coarse.mean, fine.mean
        ));
    }
    verdict(pass, detail.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 11] = [
        ("partition of unity", partition_of_unity),
        ("transform and derivative exactness", transforms_and_derivatives),
        ("energy identity", energy_identity),
        ("heat kernel", heat_kernel),
        ("radial cancellations", radial_cancellations),
        ("Bony identity", bony_identity),
        ("low-mode synchronization", synchronization),
        ("scaling invariance", scaling_invariance),
        ("wavenumber report properties", wavenumber_properties),
        ("RK4 order", rk4_order),
        ("commutator ensembles", commutator_ensembles),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let v = check();
        let status = if v.pass { "PASS" } else { "FAIL" };
        failures += usize::from(!v.pass);
        println!(
            "[{status}] {id:>2} {name}: {} ({:.1} s)",
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
