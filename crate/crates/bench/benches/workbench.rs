use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use joints_bench::*;
use joints_core::algebra::resultant;
use joints_core::incidence::{count_incidences, ff_full_census};
use joints_core::joints::find_joints;
use joints_core::partition::{gk_partition, PartitionOptions};
use joints_core::peeling::peel_joints;
use joints_core::vanishing::dvir_polynomial;

fn grid_pipeline(c: &mut Criterion) {
    let mut g = c.benchmark_group("grid");
    g.sample_size(10);
    for side in [4usize, 6, 8] {
        let arr = grid(side);
        g.bench_with_input(BenchmarkId::new("detect", side), &arr, |b, arr| b.iter(|| find_joints(arr).unwrap()));
        let joints = find_joints(&arr).unwrap();
        g.bench_with_input(BenchmarkId::new("peel", side), &arr, |b, arr| {
            b.iter(|| peel_joints(arr, &joints).unwrap())
        });
    }
    g.finish();
}

fn census(c: &mut Criterion) {
    let mut g = c.benchmark_group("census");
    for p in [5u64, 11, 17] {
        g.bench_with_input(BenchmarkId::from_parameter(p), &p, |b, &p| b.iter(|| ff_full_census(p, 2).unwrap()));
    }
    g.finish();
}

fn incidences(c: &mut Criterion) {
    let arr = random_rational(200);
    let pts = joints_core::incidence::rich_points(&arr, 2).unwrap();
    c.bench_function("incidences/random200", |b| b.iter(|| count_incidences(&pts, &arr).unwrap()));
}

fn partition(c: &mut Criterion) {
    let mut g = c.benchmark_group("partition");
    g.sample_size(10);
    let pts = plane_points(2000);
    for d in [4u32, 8] {
        g.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, &d| {
            b.iter(|| gk_partition(&pts, d, &PartitionOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn resultants(c: &mut Criterion) {
    let mut g = c.benchmark_group("resultant");
    for deg in [2u32, 4] {
        let (f, h) = resultant_pair(deg);
        g.bench_with_input(BenchmarkId::from_parameter(deg), &deg, |b, _| b.iter(|| resultant(&f, &h, 0).unwrap()));
    }
    g.finish();
}

fn vanishing(c: &mut Criterion) {
    let mut g = c.benchmark_group("dvir_fp101");
    g.sample_size(10);
    for m in [100usize, 500] {
        let (f, pts) = cloud_fp101(m);
        g.bench_with_input(BenchmarkId::from_parameter(m), &pts, |b, pts| {
            b.iter(|| dvir_polynomial(f, 3, pts).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, grid_pipeline, census, incidences, partition, resultants, vanishing);
criterion_main!(benches);
