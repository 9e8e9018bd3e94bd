use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rblda_bench::{eeg_shaped, small};
use rblda_core::{rblda_fit_v1, rblda_fit_v2, rlda_direct, rlda_fast, Scaling};

fn rlda_solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("rlda");
    // d = d1 d2 grows past n, where the fast solver works in sample space
    for (d1, d2) in [(8, 4), (16, 8), (32, 8)] {
        let data = small(d1, d2, 10, 3, 3);
        let x = data.vectorized();
        let d = d1 * d2;
        group.bench_with_input(BenchmarkId::new("direct", d), &x, |b, x| {
            b.iter(|| rlda_direct(x, data.labels(), 3, 0.1).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("fast", d), &x, |b, x| {
            b.iter(|| rlda_fast(x, data.labels(), 3, 0.1).unwrap())
        });
    }
    group.finish();
}

fn rblda_solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("rblda");
    group.sample_size(10);
    for (name, data) in [("small", small(12, 6, 20, 3, 4)), ("eeg", eeg_shaped(8, 5))] {
        group.bench_function(BenchmarkId::new("v1", name), |b| {
            b.iter(|| rblda_fit_v1(&data, 0.1, 0.1, Scaling::WOrthogonal).unwrap())
        });
        group.bench_function(BenchmarkId::new("v2", name), |b| {
            b.iter(|| rblda_fit_v2(&data, 0.1, 0.1, Scaling::WOrthogonal).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, rlda_solvers, rblda_solvers);
criterion_main!(benches);
