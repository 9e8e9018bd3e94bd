mod common;

use common::gaussian_dataset;
use proptest::prelude::*;
use rblda_core::dataio::rng::SplitMix64;
use rblda_core::matalg::max_abs;
use rblda_core::rlda::shrink;
use rblda_core::scatter::vector_scatters;
use rblda_core::{bilinear_scatters, Direction, Mat, MtsDataset};

fn rel_frobenius(a: &Mat, b: &Mat) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

#[test]
fn bilinear_additivity_on_seeded_datasets() {
    for seed in 0..100u64 {
        let mut rng = SplitMix64::new(seed);
        let d1 = 1 + rng.below(8) as usize;
        let d2 = 1 + rng.below(8) as usize;
        let c = 1 + rng.below(4) as usize;
        let n = c + rng.below(20) as usize;
        let data = gaussian_dataset(seed + 500, d1, d2, n, c, 1.0);
        let s = bilinear_scatters(&data).unwrap();
        for dir in [Direction::Column, Direction::Row] {
            let sum = s.within(dir) + s.between(dir);
            assert!(rel_frobenius(s.total(dir), &sum) <= 1e-9, "seed {seed} {dir}");
        }
    }
}

/// Kronecker expansion `E ⊗ I_b` of the class indicator and `Π ⊗ I_b` of
/// the class counts, materialized explicitly.
fn explicit_between(data: &MtsDataset, direction: Direction) -> Mat {
    let (d1, d2) = data.dims();
    let (d, b) = match direction {
        Direction::Column => (d1, d2),
        Direction::Row => (d2, d1),
    };
    let n = data.len();
    let c = data.n_classes();
    let mut mean = Mat::zeros(d1, d2);
    for x in data.observations() {
        mean += x;
    }
    mean /= n as f64;
    let mut unfolded = Mat::zeros(d, b * n);
    for (i, x) in data.observations().iter().enumerate() {
        let dev = x - &mean;
        let block = match direction {
            Direction::Column => dev,
            Direction::Row => dev.transpose(),
        };
        unfolded.columns_mut(i * b, b).copy_from(&block);
    }
    let mut indicator = Mat::zeros(b * n, b * c);
    let mut counts = vec![0.0; c];
    for (i, &y) in data.labels().iter().enumerate() {
        counts[y] += 1.0;
        for k in 0..b {
            indicator[(i * b + k, y * b + k)] = 1.0;
        }
    }
    let pi_inv = Mat::from_fn(b * c, b * c, |r, k| if r == k { 1.0 / counts[r / b] } else { 0.0 });
    &unfolded * &indicator * pi_inv * indicator.transpose() * unfolded.transpose() / (n * b) as f64
}

#[test]
fn between_scatter_matches_block_form() {
    for seed in 0..40u64 {
        let mut rng = SplitMix64::new(seed);
        let d1 = 1 + rng.below(5) as usize;
        let d2 = 1 + rng.below(5) as usize;
        let c = 1 + rng.below(3) as usize;
        let n = c + rng.below((9 - c) as u64) as usize;
        let data = gaussian_dataset(seed + 900, d1, d2, n, c, 2.0);
        let s = bilinear_scatters(&data).unwrap();
        for dir in [Direction::Column, Direction::Row] {
            let explicit = explicit_between(&data, dir);
            assert!(max_abs(&(s.between(dir) - explicit)) <= 1e-10, "seed {seed} {dir}");
        }
    }
}

#[test]
fn regularized_identity_with_shared_variance() {
    for seed in 0..20u64 {
        let data = gaussian_dataset(seed, 6, 3, 14, 3, 1.0);
        let x = data.vectorized();
        let s = vector_scatters(&x, data.labels(), 3).unwrap();
        let sigma = s.total.trace() / x.nrows() as f64;
        for r in [1e-6, 0.1, 0.5, 0.99] {
            let lhs = shrink(&s.total, r, sigma).unwrap();
            let rhs = shrink(&s.within, r, sigma).unwrap() + &s.between * (1.0 - r);
            assert!(max_abs(&(lhs - rhs)) <= 1e-12);
        }
    }
}

fn all_scatters(data: &MtsDataset) -> Vec<Mat> {
    let s = bilinear_scatters(data).unwrap();
    vec![s.s1w, s.s1b, s.s1t, s.s2w, s.s2b, s.s2t]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scatters_scale_quadratically(seed in any::<u64>(), alpha in -4.0f64..4.0) {
        prop_assume!(alpha.abs() > 1e-3);
        let data = gaussian_dataset(seed, 4, 3, 9, 3, 1.0);
        let scaled = data.map(|x| x * alpha).unwrap();
        for (a, b) in all_scatters(&data).iter().zip(all_scatters(&scaled)) {
            prop_assert!(rel_frobenius(&(a * (alpha * alpha)), &b) <= 1e-12);
        }
    }

    #[test]
    fn scatters_ignore_observation_order(seed in any::<u64>()) {
        let data = gaussian_dataset(seed, 3, 5, 10, 2, 1.0);
        let mut order: Vec<usize> = (0..data.len()).collect();
        SplitMix64::new(seed ^ 0x5555).shuffle(&mut order);
        let shuffled = data.subset(&order);
        for (a, b) in all_scatters(&data).iter().zip(all_scatters(&shuffled)) {
            prop_assert!(max_abs(&(a - &b)) <= 1e-12 * a.norm().max(1.0));
        }
    }
}
