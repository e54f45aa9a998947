//! Grid kernels under the active execution mode.
//!
//! ```text
//! cargo bench -p helfrich-phase                         # rayon
//! cargo bench -p helfrich-phase --no-default-features   # sequential
//! ```
//!
//! Benchmark ids carry the mode, so both runs land side by side in the
//! criterion report.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use helfrich_phase::energy::{HelfrichParams, PhaseField, PhaseParams};
use helfrich_phase::grid::derivatives;
use helfrich_phase::minimize::{grad_objective, MinimizeConfig};
use helfrich_phase::recovery::{build_recovery_field, RecoveryProfile};
use helfrich_phase::{Grid3, ImplicitSurface, ScalarField3};

const MODE: &str = if cfg!(feature = "parallel") { "parallel" } else { "sequential" };

fn sphere_field(n: usize, eps: f64) -> ScalarField3 {
    let grid = Grid3::cube(n, 2.0).unwrap();
    let s = ImplicitSurface::sphere(1.0).unwrap();
    build_recovery_field(&s, &RecoveryProfile::new(eps).unwrap(), &grid).unwrap()
}

fn kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernels");
    group.sample_size(10);
    let hp = HelfrichParams::new(1.0, -0.5, 0.0).unwrap();
    for n in [48, 96] {
        let u = sphere_field(n, 0.2);
        let p = PhaseParams::new(0.2).unwrap();
        group.bench_with_input(BenchmarkId::new(format!("derivatives/{MODE}"), n), &u, |b, u| {
            b.iter(|| derivatives(black_box(u)))
        });
        group.bench_with_input(BenchmarkId::new(format!("report/{MODE}"), n), &u, |b, u| {
            b.iter(|| PhaseField::new(black_box(u), p).report(&hp))
        });
        let cfg = MinimizeConfig::new(p, hp);
        group.bench_with_input(BenchmarkId::new(format!("grad_objective/{MODE}"), n), &u, |b, u| {
            b.iter(|| grad_objective(black_box(u), &cfg))
        });
    }
    group.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
