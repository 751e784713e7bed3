use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use emhd_core::exec::Exec;
use emhd_core::integrator::step;
use emhd_core::littlewood_paley::estimates::{transport_ensemble, ENSEMBLE_WINDOW};
use emhd_core::model::{nonlinear_rhs, Variant};
use emhd_core::random::{low_mode_state, rng, smooth_field};
use emhd_core::spectral::TorusGrid;

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn transforms(c: &mut Criterion) {
    let mut group = c.benchmark_group("fft_roundtrip");
    for n in [128, 256] {
        for (name, exec) in POLICIES {
            let g = TorusGrid::with_exec(n, 1.0, exec).unwrap();
            let u = smooth_field(&g, &mut rng(1), g.cutoff());
            group.bench_with_input(BenchmarkId::new(name, n), &u, |b, u| {
                b.iter(|| black_box(u.transform_roundtrip().unwrap()))
            });
        }
    }
    group.finish();
}

fn right_hand_side(c: &mut Criterion) {
    let mut group = c.benchmark_group("nonlinear_rhs");
    for (name, exec) in POLICIES {
        let g = TorusGrid::with_exec(128, 1.0, exec).unwrap();
        let s = low_mode_state(&g, 3, 1.0, 0.1).unwrap();
        group.bench_function(BenchmarkId::new(name, 128), |b| b.iter(|| black_box(nonlinear_rhs(&s, Variant::Emhd1))));
    }
    group.finish();
}

fn time_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("rk4_step");
    group.sample_size(20);
    for (name, exec) in POLICIES {
        let g = TorusGrid::with_exec(128, 1.0, exec).unwrap();
        let s = low_mode_state(&g, 3, 1.0, 0.1).unwrap();
        group.bench_function(BenchmarkId::new(name, 128), |b| {
            b.iter(|| black_box(step(&s, 1e-6, Variant::Emhd1, None).unwrap()))
        });
    }
    group.finish();
}

fn ensembles(c: &mut Criterion) {
    let mut group = c.benchmark_group("transport_ensemble");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        let g = TorusGrid::with_exec(64, 1.0, exec).unwrap();
        group.bench_function(BenchmarkId::new(name, 64), |b| {
            b.iter(|| black_box(transport_ensemble(&g, 8, 17, ENSEMBLE_WINDOW).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, transforms, right_hand_side, time_step, ensembles);
criterion_main!(benches);
