use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use hartogs_bench::{coboundary_fixture, torus_fixture, tube_region};
use hartogs_core::bundle::{chern_cocycle, validate_cocycle};
use hartogs_core::geometry::grid_components;
use hartogs_core::nerve::{build_nerve, cohomology, smith_normal_form, Resolution, Ring};
use hartogs_core::scenarios::torus_core_cover;

fn smith(c: &mut Criterion) {
    let m = coboundary_fixture(3, 1).expect("fixture");
    c.bench_function("smith_normal_form/torus3_delta1", |b| b.iter(|| smith_normal_form(black_box(&m))));
}

fn nerve(c: &mut Criterion) {
    let cover = torus_core_cover(3, 1.5).expect("cover");
    c.bench_function("build_nerve/torus3_k3", |b| {
        b.iter(|| build_nerve(black_box(&cover), 3, &Resolution::analytic(0)).expect("nerve"))
    });
    let f = torus_fixture(3, 4).expect("fixture");
    c.bench_function("cohomology/torus3_h2", |b| {
        b.iter(|| cohomology(black_box(&f.nerve), 2, Ring::Z, false).expect("cohomology"))
    });
}

fn bundle(c: &mut Criterion) {
    let f = torus_fixture(3, 3).expect("fixture");
    c.bench_function("validate_cocycle/l_nt3", |b| {
        b.iter(|| validate_cocycle(black_box(&f.bundle), 4, 1e-9, 0).expect("validate"))
    });
    c.bench_function("chern_cocycle/l_nt3", |b| b.iter(|| chern_cocycle(black_box(&f.bundle), 1e-6).expect("chern")));
}

fn grid(c: &mut Criterion) {
    let g = tube_region();
    let mut group = c.benchmark_group("grid_components");
    group.sample_size(10);
    group.bench_function("tube2_step0.2", |b| b.iter(|| grid_components(black_box(&g), 0.2, 10_000_000).expect("grid")));
    group.finish();
}

criterion_group!(benches, smith, nerve, bundle, grid);
criterion_main!(benches);
