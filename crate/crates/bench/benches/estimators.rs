use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rocmar::simulation::{find_preset, run_scenario};
use rocmar::{fit_logistic, roc_conv, roc_ipw, roc_kernel_ipw, ProbabilityGrid, RegressionSpec};
use rocmar_bench::populations;

fn estimators(c: &mut Criterion) {
    let grid = ProbabilityGrid::default();
    let spec = RegressionSpec::full(1);
    let mut group = c.benchmark_group("estimators");
    for n in [100, 1000, 5000] {
        let (d, h) = populations(n, 7);
        let fd = fit_logistic(&d, &[0]).unwrap();
        let fh = fit_logistic(&h, &[0]).unwrap();
        group.bench_with_input(BenchmarkId::new("ipw", n), &n, |b, _| {
            b.iter(|| roc_ipw(black_box(&d), black_box(&h), &fd, &fh, &grid).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("kernel", n), &n, |b, _| {
            b.iter(|| roc_kernel_ipw(black_box(&d), black_box(&h), &fd, &fh, &grid).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("conv", n), &n, |b, _| {
            b.iter(|| roc_conv(black_box(&d), black_box(&h), &spec, &spec, &grid).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("logistic_fit", n), &n, |b, _| {
            b.iter(|| fit_logistic(black_box(&d), &[0]).unwrap())
        });
    }
    group.finish();
}

fn scenario(c: &mut Criterion) {
    let mut config = find_preset("table5-m1m1-logistic").unwrap().config;
    config.n_rep = 50;
    let mut group = c.benchmark_group("scenario");
    group.sample_size(10);
    group.bench_function("table5_50_reps", |b| b.iter(|| run_scenario(black_box(&config)).unwrap()));
    group.finish();
}

criterion_group!(benches, estimators, scenario);
criterion_main!(benches);
