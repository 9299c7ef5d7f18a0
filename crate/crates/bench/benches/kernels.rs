use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use iterlim::entropy::{self, ProbabilityDistribution};
use iterlim::{GridFunction, LimitProblem, TaylorSeries};

fn expm1x(radius: f64) -> TaylorSeries {
    let mut coeffs = TaylorSeries::exp(0.0, radius, 64)
        .unwrap()
        .coeffs()
        .to_vec();
    coeffs[0] = 0.0;
    coeffs[1] = 0.0;
    TaylorSeries::new(0.0, radius, coeffs).unwrap()
}

fn problem() -> LimitProblem {
    let g = TaylorSeries::new(0.0, 0.5, vec![0.0, 0.0, 1.0]).unwrap();
    LimitProblem::with_default_tol(expm1x(0.5), g).unwrap()
}

fn series_kernels(c: &mut Criterion) {
    let s = expm1x(0.5);
    let mut group = c.benchmark_group("iterated_antiderivative");
    for n in [1usize, 16, 128] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| black_box(&s).iterated_antiderivative(n))
        });
    }
    group.finish();
}

fn limit_kernels(c: &mut Criterion) {
    let p = problem();
    c.bench_function("iterated_ratio n=200", |b| {
        b.iter(|| p.iterated_ratio(black_box(0.37), 200).unwrap())
    });
    c.bench_function("limit_via_iteration tol=1e-6", |b| {
        b.iter(|| {
            p.limit_via_iteration(black_box(0.5), 1e-6, 100_000_000)
                .unwrap()
        })
    });
    c.bench_function("run_convergence 40x100", |b| {
        b.iter(|| p.run_convergence(black_box(40), 100).unwrap())
    });
}

fn quad_kernels(c: &mut Criterion) {
    let u = GridFunction::from_series(&expm1x(0.5), 500, 1e-3).unwrap();
    c.bench_function("cumulative_integral M=500", |b| {
        b.iter(|| black_box(&u).cumulative_integral().unwrap())
    });
}

fn entropy_kernels(c: &mut Criterion) {
    let d = ProbabilityDistribution::uniform(16).unwrap();
    c.bench_function("q_independence_report 3q x 200n", |b| {
        b.iter(|| entropy::q_independence_report(black_box(&d), &[1.2, 1.5, 1.8], 200).unwrap())
    });
}

criterion_group!(
    benches,
    series_kernels,
    limit_kernels,
    quad_kernels,
    entropy_kernels
);
criterion_main!(benches);
