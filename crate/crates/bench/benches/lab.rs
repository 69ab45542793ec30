use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use waring_core::counting::{even_moment, mixed_counts_fixed_p, power_series, vinogradov_count, DftEvaluator};
use waring_core::expsums::{v_integral, weyl_sum_f, Frequency};
use waring_core::local::SingularSeriesTable;
use waring_core::smooth::smooth_set;
use waring_core::Budget;

fn convolution(c: &mut Criterion) {
    let budget = Budget::default();
    let mut g = c.benchmark_group("convolution");
    for p in [20.0, 40.0] {
        g.bench_with_input(BenchmarkId::new("mixed k3 t2 u2", p), &p, |b, &p| {
            b.iter(|| mixed_counts_fixed_p(3, p, 2, 2, Some(0.6), &budget).unwrap())
        });
    }
    let series = power_series(2, 200.0, None, &budget).unwrap();
    g.bench_function("even moment k2 P200 s3", |b| {
        b.iter(|| even_moment(black_box(&series), 3, &budget).unwrap())
    });
    let dft = DftEvaluator::fixed_p(3, 12.0, 2, 2, Some(0.6), &budget).unwrap();
    g.bench_function("dft count k3 P12", |b| b.iter(|| dft.count(black_box(3000)).unwrap()));
    g.finish();
}

fn vinogradov(c: &mut Criterion) {
    let budget = Budget::default();
    c.bench_function("vinogradov s3 k3 X20", |b| {
        b.iter(|| vinogradov_count(3, 3, black_box(20), &budget).unwrap())
    });
}

fn singular_series(c: &mut Criterion) {
    let budget = Budget::default();
    c.bench_function("singular series table k2 s5 Q200", |b| {
        b.iter(|| SingularSeriesTable::new(2, 5, black_box(200), &budget).unwrap())
    });
    let table = SingularSeriesTable::new(2, 5, 200, &budget).unwrap();
    c.bench_function("singular series value", |b| {
        b.iter(|| table.value(black_box(10_007)).unwrap())
    });
}

fn exponential_sums(c: &mut Criterion) {
    let budget = Budget::default();
    c.bench_function("weyl f k3 P1e4", |b| {
        b.iter(|| weyl_sum_f(3, 1e4, Frequency::real(black_box(0.271_828_183))).unwrap())
    });
    c.bench_function("v integral k3 P1e3", |b| {
        b.iter(|| v_integral(3, 1e3, black_box(3e-8), &budget).unwrap())
    });
    c.bench_function("smooth set P1e6 eta0.5", |b| {
        b.iter(|| smooth_set(black_box(1e6), 0.5, &budget).unwrap())
    });
}

criterion_group!(benches, convolution, vinogradov, singular_series, exponential_sums);
criterion_main!(benches);
