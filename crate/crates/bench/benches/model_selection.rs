use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rblda_bench::eeg_shaped;
use rblda_core::{cross_validate, CvConfig, CvMethod, RegGrid};

fn grid_growth(c: &mut Criterion) {
    let data = eeg_shaped(8, 1);
    let mut group = c.benchmark_group("cross_validate_rblda");
    group.sample_size(10);
    for m in [1, 2, 5, 10] {
        let mut config = CvConfig::new(CvMethod::Rblda, RegGrid::linspace(m).unwrap());
        config.folds = 4;
        group.bench_with_input(BenchmarkId::from_parameter(m * m), &config, |b, config| {
            b.iter(|| cross_validate(&data, config).unwrap())
        });
    }
    group.finish();
}

fn rlda_grid_growth(c: &mut Criterion) {
    let data = eeg_shaped(8, 2);
    let mut group = c.benchmark_group("cross_validate_rlda");
    group.sample_size(10);
    for m in [1, 5, 13] {
        let mut config = CvConfig::new(CvMethod::Rlda, RegGrid::linspace(m).unwrap());
        config.folds = 4;
        group.bench_with_input(BenchmarkId::from_parameter(m), &config, |b, config| {
            b.iter(|| cross_validate(&data, config).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, grid_growth, rlda_grid_growth);
criterion_main!(benches);
