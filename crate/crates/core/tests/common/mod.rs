#![allow(dead_code)]

use rblda_core::dataio::rng::SplitMix64;
use rblda_core::{Mat, MtsDataset, Vector};

/// Gaussian observations with a class-dependent mean shift.
pub fn gaussian_dataset(seed: u64, d1: usize, d2: usize, n: usize, c: usize, shift: f64) -> MtsDataset {
    let mut rng = SplitMix64::new(seed);
    let centers: Vec<Mat> = (0..c)
        .map(|_| Mat::from_fn(d1, d2, |_, _| shift * rng.next_gaussian()))
        .collect();
    let labels: Vec<usize> = (0..n).map(|i| i % c).collect();
    let obs = labels
        .iter()
        .map(|&y| Mat::from_fn(d1, d2, |r, k| centers[y][(r, k)] + rng.next_gaussian()))
        .collect();
    MtsDataset::new(d1, d2, c, obs, labels).unwrap()
}

pub fn gaussian_matrix(rng: &mut SplitMix64, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| rng.next_gaussian())
}

pub fn random_orthonormal(rng: &mut SplitMix64, d: usize) -> Mat {
    gaussian_matrix(rng, d, d).qr().q()
}

/// Cyclic Jacobi eigenvalue iteration for symmetric matrices, written
/// independently of the library solvers. Values are returned descending
/// together with the matching eigenvector columns.
pub fn jacobi_eig(s: &Mat) -> (Vector, Mat) {
    let d = s.nrows();
    let mut a = s.clone();
    let mut v = Mat::identity(d, d);
    for _sweep in 0..100 {
        let off: f64 = (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off <= 1e-30 * a.norm_squared().max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..d {
            for q in p + 1..d {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s_ = t * c;
                for k in 0..d {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s_ * akq;
                    a[(k, q)] = s_ * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s_ * aqk;
                    a[(q, k)] = s_ * apk + c * aqk;
                }
                for k in 0..d {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s_ * vkq;
                    v[(k, q)] = s_ * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = Vector::from_iterator(d, order.iter().map(|&i| a[(i, i)]));
    let vectors = Mat::from_fn(d, d, |r, k| v[(r, order[k])]);
    (values, vectors)
}

/// Orthogonal projector onto the column span of `b`.
pub fn projector(b: &Mat) -> Mat {
    if b.ncols() == 0 {
        return Mat::zeros(b.nrows(), b.nrows());
    }
    let q = b.clone().qr().q();
    &q * q.transpose()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
