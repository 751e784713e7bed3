use std::path::Path;
use std::process::{Command, Output};

fn emhd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emhd")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn simulate_then_wavenumber_from_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", "grid.n=32\nrun.t_end=2e-3\ninit.energy=1e-2\ndiag.cadence=2\n");
    let out = dir.path().join("sim");
    let o = emhd(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let energy = std::fs::read_to_string(out.join("energy.csv")).unwrap();
    assert!(energy.starts_with("t,E,D,work,residual\n"));
    assert!(energy.lines().count() > 2);
    let echo = std::fs::read_to_string(out.join("config.txt")).unwrap();
    assert!(echo.contains("init.seed=5"));

    let snap = out.join("final.snap");
    let wn = dir.path().join("wn");
    let o = emhd(&["wavenumber", "--config", &cfg, "--init", snap.to_str().unwrap(), "--out", wn.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let shells = std::fs::read_to_string(wn.join("shells.csv")).unwrap();
    assert!(shells.starts_with("kind,q,shell_quantity,lowpass_linf,shell_pass,tail_pass,pass\n"));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("wavenumber")).count(), 3);
}

#[test]
fn validation_failures_exit_two_and_list_everything() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "grid.n=15\nphysics.mu=-1\nbogus.key=3\n");
    let o = emhd(&["audit", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for needle in ["bogus.key", "physics.mu", "grid"] {
        assert!(err.contains(needle), "missing {needle}: {err}");
    }

    let cfg = write(dir.path(), "lps.cfg", "grid.n=32\ndiag.r=4\ndiag.s=3\n");
    let o = emhd(&["monitor", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("diag.s"));
}

#[test]
fn blow_up_exits_three_with_time() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "blow.cfg", "grid.n=32\nintegrator.mode=fixed\nintegrator.dt=0.05\nrun.t_end=1\n");
    let o = emhd(&["simulate", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("failure time: t = "));
    let energy = std::fs::read_to_string(dir.path().join("energy.csv")).unwrap();
    assert!(energy.lines().count() >= 2);
}

#[test]
fn sync_monitor_and_scale_check_write_their_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.cfg", "grid.n=64\nrun.t_end=0.01\ndiag.cadence=1\n");
    for (cmd, file, header) in [
        ("sync", "sync.csv", "t,hs_norm,Q_index,lambda_Q"),
        ("monitor", "monitor.csv", "t,f1,f2,lr_norm_b,int_f1,int_f2,int_lps,Q_a,Q_b"),
        ("scale-check", "scaling.csv", "kind,q,original,rescaled,rel_err"),
        ("radial", "radial.csv", "t,j2,hall,divergence"),
    ] {
        let out = dir.path().join(cmd);
        let o = emhd(&[cmd, "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{cmd}: {}", stderr(&o));
        let text = std::fs::read_to_string(out.join(file)).unwrap();
        assert_eq!(text.lines().next(), Some(header), "{cmd}");
        assert!(text.lines().count() > 1, "{cmd}");
    }
}

#[test]
fn seed_changes_the_initial_state() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "z.cfg", "grid.n=16\nrun.t_end=0\n");
    let snap = |seed: &str| {
        let out = dir.path().join(seed);
        let o = emhd(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", seed]);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read(out.join("final.snap")).unwrap()
    };
    assert_eq!(snap("1"), snap("1"));
    assert_ne!(snap("1"), snap("2"));
}

#[test]
fn unrepresentable_rescaling_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "m.cfg", "grid.n=32\nscale.m=1\n");
    let o = emhd(&["scale-check", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cutoff"));
}
