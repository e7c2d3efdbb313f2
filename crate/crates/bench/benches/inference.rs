use std::hint::black_box;

use chdc_bench::Workload;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

const CLASSES: usize = 10;

fn scaling_in_queries(c: &mut Criterion) {
    let mut group = c.benchmark_group("queries");
    for m in [250, 500, 1000] {
        let w = Workload::new(CLASSES, 10_000, m, 1).unwrap();
        group.throughput(Throughput::Elements(m as u64));
        group.bench_with_input(BenchmarkId::from_parameter(m), &w, |b, w| b.iter(|| black_box(w.run().unwrap())));
    }
    group.finish();
}

fn scaling_in_dimension(c: &mut Criterion) {
    let mut group = c.benchmark_group("dimension");
    for dim in [2_500, 5_000, 10_000] {
        let w = Workload::new(CLASSES, dim, 250, 2).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(dim), &w, |b, w| b.iter(|| black_box(w.run().unwrap())));
    }
    group.finish();
}

criterion_group!(benches, scaling_in_queries, scaling_in_dimension);
criterion_main!(benches);
