use criterion::{black_box, criterion_group, criterion_main, Criterion};

use semilie_core::intersection::verify_afl;
use semilie_core::kernel::{build_matrix, certify_full_rank};
use semilie_core::orbital::{derivative_closed_form, orbital_closed_form, orbital_support_sum};
use semilie_core::padic::{sweep_one_disk, QuadCtx};
use semilie_core::satake::verify_satake;
use semilie_core::OrbitalParams;

fn orbital(c: &mut Criterion) {
    let p = OrbitalParams::new(14, -5, 100, 3, 1);
    c.bench_function("orbital_closed_form r=14", |b| b.iter(|| orbital_closed_form(black_box(&p))));
    c.bench_function("orbital_support_sum r=14", |b| b.iter(|| orbital_support_sum(black_box(&p))));
    c.bench_function("derivative_closed_form r=14", |b| b.iter(|| derivative_closed_form(black_box(&p))));
    let q = OrbitalParams::new(6, -3, 8, 9, 2);
    c.bench_function("verify_afl", |b| b.iter(|| verify_afl(black_box(&q))));
}

fn kernel(c: &mut Criterion) {
    c.bench_function("certify_full_rank s=17 vda=2 N=6", |b| {
        b.iter(|| certify_full_rank(&build_matrix(17, 2.into(), 6).unwrap()))
    });
}

fn satake(c: &mut Criterion) {
    c.bench_function("verify_satake rmax=8", |b| b.iter(|| verify_satake(black_box(8))));
}

fn volumes(c: &mut Criterion) {
    let ctx = QuadCtx::new(3, 3).unwrap();
    let mut g = c.benchmark_group("volumes");
    g.sample_size(10);
    g.bench_function("sweep_one_disk p=3 prec=3", |b| b.iter(|| sweep_one_disk(black_box(&ctx))));
    g.finish();
}

criterion_group!(benches, orbital, kernel, satake, volumes);
criterion_main!(benches);
