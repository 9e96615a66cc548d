use std::hint::black_box;

use alphastep::harness::{sweep_average_cost, SweepOptions};
use alphastep::{alpha_gamma, choose_start, critical_profile, run, Complex64, RunConfig};
use alphastep_bench::fixture;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn derivatives(c: &mut Criterion) {
    let mut group = c.benchmark_group("eval_all_derivs");
    for d in [4, 16, 64] {
        let p = fixture(d);
        let z = Complex64::new(0.3, 1.1);
        group.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, &d| {
            b.iter(|| p.eval_all_derivs(black_box(z), d).unwrap())
        });
    }
    group.finish();
}

fn alpha(c: &mut Criterion) {
    let mut group = c.benchmark_group("alpha_gamma");
    for d in [4, 16, 64] {
        let p = fixture(d);
        let z = Complex64::new(0.3, 1.1);
        group.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, _| {
            b.iter(|| alpha_gamma(&p, black_box(z)).unwrap())
        });
    }
    group.finish();
}

fn solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("run");
    for d in [4, 16] {
        let p = fixture(d);
        let cfg = RunConfig::default();
        let z0 = choose_start(d, 0.3, 1.0);
        group.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, _| {
            b.iter(|| run(&p, black_box(z0), &cfg).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let p = fixture(8);
    let profile = critical_profile(&p).unwrap();
    let cfg = RunConfig::default().with_lambda(profile.lambda_f);
    c.bench_function("sweep_d8_m16", |b| {
        b.iter(|| sweep_average_cost("bench", &p, &profile, 16, &cfg, SweepOptions::default()).unwrap())
    });
}

criterion_group!(benches, derivatives, alpha, solve, sweep);
criterion_main!(benches);
