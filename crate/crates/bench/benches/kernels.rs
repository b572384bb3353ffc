use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracgibbs_core::dynamics::{cubic_term, step_rk4, step_strang};
use fracgibbs_core::experiments::power_law_data;
use fracgibbs_core::measures::{sample_gaussian_ensemble, sample_gibbs, Ensemble, MeasureConfig};
use fracgibbs_core::{Gamma, ModelParams};

const SIZES: [usize; 3] = [16, 64, 256];

fn params(n: usize) -> ModelParams {
    ModelParams::new(0.75, Gamma::Defocusing, n, 0.0).unwrap()
}

fn kernels(c: &mut Criterion) {
    let mut g = c.benchmark_group("kernels");
    for n in SIZES {
        let u = power_law_data(n, 0.6, 0.01, 0).unwrap();
        let p = params(n);
        let dt = p.default_dt();
        g.bench_with_input(BenchmarkId::new("cubic_term", n), &u, |b, u| b.iter(|| cubic_term(black_box(u))));
        g.bench_with_input(BenchmarkId::new("strang_step", n), &u, |b, u| {
            b.iter(|| step_strang(black_box(u), &p, dt).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("rk4_step", n), &u, |b, u| {
            b.iter(|| step_rk4(black_box(u), &p, dt).unwrap())
        });
    }
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("sampling");
    g.sample_size(10);
    let ensemble = Ensemble::new(0).with_workers(1);
    for n in SIZES {
        let cfg = MeasureConfig::new(params(n));
        g.bench_with_input(BenchmarkId::new("gaussian_1000", n), &cfg, |b, cfg| {
            b.iter(|| sample_gaussian_ensemble(cfg, &ensemble, 1000).unwrap())
        });
    }
    let cfg = MeasureConfig::new(params(8));
    g.bench_function("gibbs_rejection_100_n8", |b| b.iter(|| sample_gibbs(&cfg, &ensemble, 100).unwrap()));
    g.finish();
}

criterion_group!(benches, kernels, sampling);
criterion_main!(benches);
