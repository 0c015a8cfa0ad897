use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use normprobe_bench::{gaussian_matrix, planted_labels, suite};
use normprobe_core::probe::{
    fit_linear, fit_logistic, stratified_splits, LogisticConfig, SplitSpec,
};
use normprobe_core::{run_probe_suite, ProbeData, RunOptions};

fn logistic_fit(c: &mut Criterion) {
    let mut group = c.benchmark_group("fit_logistic");
    for dim in [16, 64, 300] {
        let x = gaussian_matrix(1500, dim, 1);
        let y = planted_labels(&x, 0.2, 2);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |b, _| {
            b.iter(|| fit_logistic(&x, &y, &LogisticConfig::default()).unwrap())
        });
    }
    group.finish();
}

fn linear_fit(c: &mut Criterion) {
    let x = gaussian_matrix(1500, 300, 3);
    let y: Vec<f64> = (0..1500).map(|i| (i % 7) as f64).collect();
    c.bench_function("fit_linear/300", |b| b.iter(|| fit_linear(&x, &y).unwrap()));
}

fn splits(c: &mut Criterion) {
    let labels: Vec<bool> = (0..2000).map(|i| i % 9 == 0).collect();
    let spec = SplitSpec::new(5, 2, 13).unwrap();
    c.bench_function("stratified_splits/2000", |b| {
        b.iter(|| stratified_splits(&labels, &spec).unwrap())
    });
}

fn probe_suite(c: &mut Criterion) {
    let (table, data) = suite(500, 32, 16, 4);
    let mut group = c.benchmark_group("run_probe_suite");
    group.sample_size(10);
    for workers in [1, 4] {
        let opts = RunOptions {
            workers,
            ..RunOptions::default()
        };
        group.bench_with_input(BenchmarkId::new("workers", workers), &opts, |b, opts| {
            b.iter(|| run_probe_suite(&table, ProbeData::Norms(&data), "bench", opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, logistic_fit, linear_fit, splits, probe_suite);
criterion_main!(benches);
