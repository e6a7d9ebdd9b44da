use argmin_eig::identities::{sample_safe_sigma, sum_inverses_check};
use argmin_eig::{minimize, random, reference_spectrum, MinimizeConfig, NormKind};
use argmin_eig_bench::{general, identity_operator, normal, rhs};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn bench_minimize(c: &mut Criterion) {
    let mut group = c.benchmark_group("minimize");
    for dim in [4, 8, 16] {
        let t = general(dim, 1);
        for norm in NormKind::ALL {
            group.bench_with_input(BenchmarkId::new(norm.as_str(), dim), &t, |b, t| {
                b.iter(|| minimize(black_box(t), norm, &MinimizeConfig::default()))
            });
        }
        let n = normal(dim, 2);
        group.bench_with_input(BenchmarkId::new("two-normal", dim), &n, |b, t| {
            b.iter(|| minimize(black_box(t), NormKind::Two, &MinimizeConfig::default()))
        });
    }
    group.finish();
}

fn bench_lu(c: &mut Criterion) {
    let mut group = c.benchmark_group("lu-solve");
    for dim in [8, 16, 32] {
        let a = general(dim, 3);
        let b = rhs(dim, 3);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &(a, b), |bench, (a, b)| {
            bench.iter(|| black_box(a).solve(black_box(b)).unwrap())
        });
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("reference-spectrum");
    for dim in [8, 16, 32] {
        let t = general(dim, 4);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &t, |b, t| {
            b.iter(|| reference_spectrum(black_box(t)).unwrap())
        });
    }
    group.finish();
}

fn bench_identities(c: &mut Criterion) {
    let mut group = c.benchmark_group("sum-inverses");
    for n in [4, 12] {
        let s = identity_operator(8, 5);
        let sigma = sample_safe_sigma(&mut random::rng(5), &s).unwrap();
        group.bench_with_input(BenchmarkId::new("d8", n), &n, |b, &n| {
            b.iter(|| sum_inverses_check(black_box(&s), sigma, n).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_minimize, bench_lu, bench_oracle, bench_identities);
criterion_main!(benches);
