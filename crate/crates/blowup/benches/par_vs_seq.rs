//! Parallel vs single-thread timings for the heavy paths: word-set
//! enumeration, tiling construction, the pairwise overlap audit, and
//! the tiling metric. The data-parallel loops dispatch through rayon
//! when the `parallel` feature is on, so the single-thread numbers here
//! come from a one-worker pool; building with
//! `--no-default-features` removes rayon entirely and matches the
//! one-worker timings minus pool overhead.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use blowup::io::presets;
use blowup::tiling::canonical_tiling;
use blowup::verify::{nonoverlap_check, tiling_distance};
use blowup::{omega_level, PowerVector};

fn single_thread_pool() -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("pool")
}

fn bench_omega(c: &mut Criterion) {
    let pv = PowerVector::new(vec![1, 2]).unwrap();
    let mut group = c.benchmark_group("omega_level_18");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| omega_level(black_box(18), &pv).unwrap())
    });
    let pool = single_thread_pool();
    group.bench_function("single-thread", |b| {
        b.iter(|| pool.install(|| omega_level(black_box(18), &pv).unwrap()))
    });
    group.finish();
}

fn bench_tiling(c: &mut Criterion) {
    let spec = presets::goldenb();
    let mut group = c.benchmark_group("canonical_tiling_14");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| canonical_tiling(black_box(14), &spec).unwrap())
    });
    let pool = single_thread_pool();
    group.bench_function("single-thread", |b| {
        b.iter(|| pool.install(|| canonical_tiling(black_box(14), &spec).unwrap()))
    });
    group.finish();
}

fn bench_nonoverlap(c: &mut Criterion) {
    let spec = presets::goldenb();
    let t = canonical_tiling(9, &spec).unwrap();
    let mut group = c.benchmark_group("nonoverlap_T9");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| nonoverlap_check(black_box(&t)).unwrap()));
    let pool = single_thread_pool();
    group.bench_function("single-thread", |b| {
        b.iter(|| pool.install(|| nonoverlap_check(black_box(&t)).unwrap()))
    });
    group.finish();
}

fn bench_distance(c: &mut Criterion) {
    let spec = presets::goldenb();
    let t2 = canonical_tiling(2, &spec).unwrap();
    let t6 = canonical_tiling(6, &spec).unwrap();
    let mut group = c.benchmark_group("tiling_distance_400");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| tiling_distance(black_box(&t2), black_box(&t6), 400).unwrap())
    });
    let pool = single_thread_pool();
    group.bench_function("single-thread", |b| {
        b.iter(|| pool.install(|| tiling_distance(black_box(&t2), black_box(&t6), 400).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, bench_omega, bench_tiling, bench_nonoverlap, bench_distance);
criterion_main!(benches);
