//! Regularized LDA on vector observations.
//!
//! The total scatter is shrunk toward a scalar covariance,
//! `S_t^r = (1 - r) S_t + r σ² I` with `σ² = tr(S_t) / d`, and the
//! discriminant directions solve `(S_t^r)⁻¹ S_b v = λ v`. [`rlda_direct`]
//! forms every `d x d` matrix explicitly; [`rlda_fast`] only ever factors a
//! `min(d, n)`-sized system and a `c x c` eigenproblem.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matalg::{
    gen_eig_oracle, negligible_spread, normalize_signs, rank_tolerance, scale_columns, spd_solve, sym_eig_full, symmetrize,
    Mat, Vector, EIGENVALUE_FLOOR,
};
use crate::scatter::{class_averaging_operator, remove_block_means, vector_scatters, MtsDataset};

/// How discriminant columns are normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// `Vᵀ S_t^r V = I`.
    TOrthogonal,
    /// `Vᵀ S_w^r V = I`.
    #[default]
    WOrthogonal,
    /// Every column has unit Euclidean norm.
    UnitColumn,
}

impl Scaling {
    pub fn as_str(self) -> &'static str {
        match self {
            Scaling::TOrthogonal => "t",
            Scaling::WOrthogonal => "w",
            Scaling::UnitColumn => "unit",
        }
    }
}

impl fmt::Display for Scaling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t" | "t_orthogonal" => Ok(Scaling::TOrthogonal),
            "w" | "w_orthogonal" => Ok(Scaling::WOrthogonal),
            "unit" | "unit_column" => Ok(Scaling::UnitColumn),
            other => Err(Error::input(format!("unknown scaling `{other}` (expected w, t or unit)"))),
        }
    }
}

/// A vector discriminant basis.
///
/// `values` holds `Λ_t` for t-orthogonal and unit-column bases and
/// `Λ_w = Λ_t (I - (1 - r) Λ_t)⁻¹` for w-orthogonal ones.
#[derive(Debug, Clone, PartialEq)]
pub struct RldaBasis {
    pub basis: Mat,
    pub values: Vector,
    pub scaling: Scaling,
    pub r: f64,
}

impl RldaBasis {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Generalized eigenvalues of `(S_t^r)⁻¹ S_b`, whatever the scaling.
    pub fn t_values(&self) -> Vector {
        match self.scaling {
            Scaling::WOrthogonal => self.values.map(|w| w / (1.0 + (1.0 - self.r) * w)),
            _ => self.values.clone(),
        }
    }

    /// Keep the leading `q` directions.
    pub fn truncate(&self, q: usize) -> Result<Self> {
        if q > self.len() {
            return Err(Error::input(format!("requested {q} directions, only {} available", self.len())));
        }
        Ok(Self {
            basis: self.basis.columns(0, q).into_owned(),
            values: self.values.rows(0, q).into_owned(),
            scaling: self.scaling,
            r: self.r,
        })
    }

    /// Unit-norm columns, values reported as `Λ_t`.
    pub fn unit_columns(&self) -> Self {
        Self {
            basis: unit_normalize(&self.basis),
            values: self.t_values(),
            scaling: Scaling::UnitColumn,
            r: self.r,
        }
    }
}

pub(crate) fn check_regularization(r: f64) -> Result<()> {
    if r > 0.0 && r <= 1.0 {
        Ok(())
    } else {
        Err(Error::input(format!("regularization {r} outside (0, 1]")))
    }
}

/// `(1 - r) S + r σ² I`.
pub fn shrink(s: &Mat, r: f64, sigma_sq: f64) -> Result<Mat> {
    check_regularization(r)?;
    if !(sigma_sq > 0.0) {
        return Err(Error::input(format!("shrinkage target variance {sigma_sq} must be positive")));
    }
    if !s.is_square() {
        return Err(Error::input("shrink expects a square matrix"));
    }
    let mut out = s * (1.0 - r);
    for i in 0..out.nrows() {
        out[(i, i)] += r * sigma_sq;
    }
    Ok(symmetrize(&out))
}

fn unit_normalize(m: &Mat) -> Mat {
    let norms: Vec<f64> = m.column_iter().map(|c| c.norm()).collect();
    scale_columns(m, norms.into_iter().map(|n| if n > 0.0 { n.recip() } else { 1.0 }))
}

/// Apply the requested scaling to a t-orthogonal basis (`Vᵀ S_t^r V = I`)
/// with generalized eigenvalues `lambda_t`.
pub(crate) fn finish_scaling(t_basis: Mat, lambda_t: Vector, r: f64, scaling: Scaling) -> Result<(Mat, Vector)> {
    let (mut basis, values) = match scaling {
        Scaling::TOrthogonal => (t_basis, lambda_t),
        Scaling::UnitColumn => (unit_normalize(&t_basis), lambda_t),
        Scaling::WOrthogonal => {
            let slack = lambda_t.map(|l| 1.0 - (1.0 - r) * l);
            if let Some(i) = slack.iter().position(|&s| s <= 1e-12) {
                return Err(Error::degenerate(format!(
                    "1 - (1 - r) λ = {:e} for eigenvalue {} (r = {r})",
                    slack[i], lambda_t[i]
                )));
            }
            let basis = scale_columns(&t_basis, slack.iter().map(|s| s.sqrt().recip()));
            let values = lambda_t.zip_map(&slack, |l, s| l / s);
            (basis, values)
        }
    };
    normalize_signs(&mut basis);
    Ok((basis, values))
}

/// Eigenpairs of a small symmetric PSD matrix with eigenvalues above both the
/// numerical-rank tolerance and [`EIGENVALUE_FLOOR`].
pub(crate) fn leading_pairs(r: &Mat) -> (Mat, Vector) {
    let pairs = sym_eig_full(&symmetrize(r));
    if pairs.values.is_empty() {
        return (pairs.vectors, pairs.values);
    }
    let largest = pairs.values[0].max(0.0);
    let tol = rank_tolerance(r.nrows(), r.nrows(), largest).max(EIGENVALUE_FLOOR);
    let q = pairs.values.iter().take_while(|&&v| v > tol).count();
    (
        pairs.vectors.columns(0, q).into_owned(),
        pairs.values.rows(0, q).into_owned(),
    )
}

/// Direct solve: builds `S_t^r` and `S_b` and hands them to the dense
/// generalized eigen-solver. Returns a t-orthogonal basis.
pub fn rlda_direct(x: &Mat, labels: &[usize], n_classes: usize, r: f64) -> Result<RldaBasis> {
    check_regularization(r)?;
    let scatter = vector_scatters(x, labels, n_classes)?;
    let d = x.nrows();
    let sigma_sq = scatter.total.trace() / d as f64;
    if negligible_spread(scatter.total.trace(), x.norm_squared() / x.ncols() as f64) {
        return Err(Error::degenerate("total scatter is zero"));
    }
    let metric = shrink(&scatter.total, r, sigma_sq)?;
    let pairs = gen_eig_oracle(&scatter.between, &metric)?;
    Ok(RldaBasis {
        basis: pairs.vectors,
        values: pairs.values,
        scaling: Scaling::TOrthogonal,
        r,
    })
}

/// Which side of the data Gram product the linear solve uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveSide {
    /// Sample side when `n < d`, feature side otherwise.
    #[default]
    Auto,
    /// `((1 - r) X Xᵀ + r σ² I_d)⁻¹ F_b`.
    Feature,
    /// `X ((1 - r) Xᵀ X + r σ² I_n)⁻¹ E Π^{-1/2}`.
    Sample,
}

/// Fast factorized solver returning a w-orthogonal basis.
pub fn rlda_fast(x: &Mat, labels: &[usize], n_classes: usize, r: f64) -> Result<RldaBasis> {
    rlda_fast_with(x, labels, n_classes, r, Scaling::WOrthogonal, SolveSide::Auto)
}

pub fn rlda_fast_with(
    x: &Mat,
    labels: &[usize],
    n_classes: usize,
    r: f64,
    scaling: Scaling,
    side: SolveSide,
) -> Result<RldaBasis> {
    check_regularization(r)?;
    let (d, n) = x.shape();
    if labels.len() != n {
        return Err(Error::input(format!("{n} columns but {} labels", labels.len())));
    }
    let mut counts = vec![0usize; n_classes];
    for &y in labels {
        if y >= n_classes {
            return Err(Error::input(format!("label {y} outside [0, {n_classes})")));
        }
        counts[y] += 1;
    }
    if let Some(k) = counts.iter().position(|&c| c == 0) {
        return Err(Error::input(format!("class {k} has no observations")));
    }

    // Scaled centered data: S_t = Xs Xsᵀ.
    let mean = x.column_mean();
    let mut xs = x.clone();
    for mut col in xs.column_iter_mut() {
        col -= &mean;
    }
    xs /= (n as f64).sqrt();
    let sigma_sq = xs.norm_squared() / d as f64;
    if negligible_spread(xs.norm_squared(), x.norm_squared() / n as f64) {
        return Err(Error::degenerate("total scatter is zero"));
    }

    let averaging = class_averaging_operator(labels, &counts, 1);
    let between = &xs * &averaging;

    let use_samples = match side {
        SolveSide::Auto => n < d,
        SolveSide::Feature => false,
        SolveSide::Sample => true,
    };
    let g = if use_samples {
        let mut t = xs.transpose() * &xs * (1.0 - r);
        for i in 0..n {
            t[(i, i)] += r * sigma_sq;
        }
        let mut rhs = averaging;
        remove_block_means(&mut rhs, 1);
        &xs * spd_solve(&t, &rhs)?
    } else {
        let mut s = &xs * xs.transpose() * (1.0 - r);
        for i in 0..d {
            s[(i, i)] += r * sigma_sq;
        }
        spd_solve(&s, &between)?
    };

    let reduced = between.transpose() * &g;
    let (v_r, lambda) = leading_pairs(&reduced);
    let t_basis = scale_columns(&(&g * v_r), lambda.iter().map(|l| l.sqrt().recip()));
    let (basis, values) = finish_scaling(t_basis, lambda, r, scaling)?;
    Ok(RldaBasis {
        basis,
        values,
        scaling,
        r,
    })
}

/// Rescale a t-orthogonal basis to the w-orthogonal one:
/// `V_w = V_t (I - (1 - r) Λ_t)^{-1/2}`, `Λ_w = Λ_t (I - (1 - r) Λ_t)⁻¹`.
pub fn t_to_w(basis: &RldaBasis) -> Result<RldaBasis> {
    if basis.scaling != Scaling::TOrthogonal {
        return Err(Error::input("t_to_w expects a t-orthogonal basis"));
    }
    let (b, values) = finish_scaling(basis.basis.clone(), basis.values.clone(), basis.r, Scaling::WOrthogonal)?;
    Ok(RldaBasis {
        basis: b,
        values,
        scaling: Scaling::WOrthogonal,
        r: basis.r,
    })
}

/// A fitted vector discriminant model with the training mean.
#[derive(Debug, Clone, PartialEq)]
pub struct RldaModel {
    pub basis: RldaBasis,
    pub mean: Vector,
}

/// Fit on vectorized matrix observations with the fast solver.
pub fn fit_rlda(data: &MtsDataset, r: f64, scaling: Scaling) -> Result<RldaModel> {
    let x = data.vectorized();
    let basis = rlda_fast_with(&x, data.labels(), data.n_classes(), r, scaling, SolveSide::Auto)?;
    Ok(RldaModel {
        basis,
        mean: x.column_mean(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::rng::SplitMix64;
    use crate::matalg::{max_abs, sym_psd_eig};

    fn gaussian(seed: u64, rows: usize, cols: usize) -> Mat {
        let mut rng = SplitMix64::new(seed);
        Mat::from_fn(rows, cols, |_, _| rng.next_gaussian())
    }

    fn labels(n: usize, c: usize) -> Vec<usize> {
        (0..n).map(|i| i % c).collect()
    }

    #[test]
    fn shrink_formula() {
        let s = Mat::from_diagonal(&Vector::from_vec(vec![2.0, 0.0]));
        let out = shrink(&s, 0.5, 1.0).unwrap();
        assert_eq!(out, Mat::from_diagonal(&Vector::from_vec(vec![1.5, 0.5])));
        let full = shrink(&s, 1.0, 3.0).unwrap();
        assert_eq!(full, Mat::identity(2, 2) * 3.0);
        assert!(shrink(&s, 0.0, 1.0).is_err());
        assert!(shrink(&s, 1.5, 1.0).is_err());
    }

    #[test]
    fn shrink_maps_spectrum() {
        let a = gaussian(4, 5, 5);
        let s = &a * a.transpose();
        let sigma = s.trace() / 5.0;
        let shrunk = shrink(&s, 0.3, sigma).unwrap();
        let before = sym_psd_eig(&s).unwrap();
        let after = sym_psd_eig(&shrunk).unwrap();
        assert_eq!(after.len(), 5);
        for i in 0..5 {
            let expected = 0.7 * before.values[i] + 0.3 * sigma;
            assert!((after.values[i] - expected).abs() < 1e-10 * expected);
        }
        assert!(after.values[4] >= 0.3 * sigma - 1e-12);
    }

    #[test]
    fn single_class_has_no_directions() {
        let x = gaussian(1, 4, 6);
        let direct = rlda_direct(&x, &[0; 6], 1, 0.3).unwrap();
        assert!(direct.is_empty());
        let fast = rlda_fast(&x, &[0; 6], 1, 0.3).unwrap();
        assert!(fast.is_empty());
    }

    #[test]
    fn scalar_two_class() {
        let x = Mat::from_row_slice(1, 4, &[0.0, 1.0, 3.0, 4.0]);
        let y = [0, 0, 1, 1];
        let r = 0.25;
        let b = rlda_direct(&x, &y, 2, r).unwrap();
        assert_eq!(b.len(), 1);
        // S_b = 2.25, S_t = 2.5, σ² = 2.5, S_t^r = S_t
        let expected = 2.25 / 2.5;
        assert!((b.values[0] - expected).abs() < 1e-12);
        let fast = rlda_fast(&x, &y, 2, r).unwrap();
        assert!((fast.t_values()[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn full_shrinkage_endpoint() {
        let x = gaussian(8, 6, 15);
        let y = labels(15, 3);
        let b = rlda_fast(&x, &y, 3, 1.0).unwrap();
        let bt = rlda_fast_with(&x, &y, 3, 1.0, Scaling::TOrthogonal, SolveSide::Auto).unwrap();
        assert_eq!(b.basis, bt.basis);
        assert_eq!(b.values, bt.values);
        let s = vector_scatters(&x, &y, 3).unwrap();
        let sigma = s.total.trace() / 6.0;
        let eig = sym_psd_eig(&(s.between / sigma)).unwrap();
        assert_eq!(b.len(), 2);
        for i in 0..2 {
            assert!((b.values[i] - eig.values[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn solve_sides_agree() {
        for (d, n) in [(3, 12), (30, 12)] {
            let x = gaussian(d as u64, d, n);
            let y = labels(n, 3);
            let a = rlda_fast_with(&x, &y, 3, 0.2, Scaling::WOrthogonal, SolveSide::Feature).unwrap();
            let b = rlda_fast_with(&x, &y, 3, 0.2, Scaling::WOrthogonal, SolveSide::Sample).unwrap();
            assert_eq!(a.len(), b.len());
            assert!(max_abs(&(&a.basis - &b.basis)) < 1e-8 * max_abs(&a.basis).max(1.0));
        }
    }

    #[test]
    fn prop1_substitution() {
        let basis = RldaBasis {
            basis: Mat::from_row_slice(2, 1, &[1.0, 0.0]),
            values: Vector::from_vec(vec![0.5]),
            scaling: Scaling::TOrthogonal,
            r: 0.5,
        };
        let w = t_to_w(&basis).unwrap();
        assert!((w.values[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((w.basis[(0, 0)] - 0.75_f64.powf(-0.5)).abs() < 1e-15);
        assert!((w.t_values()[0] - 0.5).abs() < 1e-15);

        let endpoint = RldaBasis { r: 1.0, ..basis.clone() };
        let same = t_to_w(&endpoint).unwrap();
        assert_eq!(same.basis, endpoint.basis);
        assert_eq!(same.values, endpoint.values);
    }

    #[test]
    fn t_to_w_rejects_infeasible_values() {
        let basis = RldaBasis {
            basis: Mat::identity(1, 1),
            values: Vector::from_vec(vec![2.0]),
            scaling: Scaling::TOrthogonal,
            r: 0.5,
        };
        assert!(matches!(t_to_w(&basis), Err(Error::Degenerate(_))));
        let w = RldaBasis { scaling: Scaling::WOrthogonal, ..basis };
        assert!(matches!(t_to_w(&w), Err(Error::Input(_))));
    }

    #[test]
    fn w_basis_satisfies_constraint() {
        let x = gaussian(17, 10, 30);
        let y = labels(30, 3);
        let r = 0.2;
        let t = rlda_direct(&x, &y, 3, r).unwrap();
        let w = t_to_w(&t).unwrap();
        let s = vector_scatters(&x, &y, 3).unwrap();
        let sigma = s.total.trace() / 10.0;
        let sw = shrink(&s.within, r, sigma).unwrap();
        let st = shrink(&s.total, r, sigma).unwrap();
        let q = w.len();
        assert!(max_abs(&(w.basis.transpose() * &sw * &w.basis - Mat::identity(q, q))) < 1e-8);
        assert!(max_abs(&(t.basis.transpose() * &st * &t.basis - Mat::identity(q, q))) < 1e-8);
        let vbv = t.basis.transpose() * &s.between * &t.basis;
        assert!(max_abs(&(vbv - Mat::from_diagonal(&t.values))) < 1e-8);
    }

    #[test]
    fn unit_columns_have_unit_norm() {
        let x = gaussian(2, 8, 20);
        let y = labels(20, 4);
        let b = rlda_fast_with(&x, &y, 4, 0.1, Scaling::UnitColumn, SolveSide::Auto).unwrap();
        for c in b.basis.column_iter() {
            assert!((c.norm() - 1.0).abs() < 1e-12);
        }
        let w = rlda_fast(&x, &y, 4, 0.1).unwrap().unit_columns();
        assert!(max_abs(&(w.basis - &b.basis)) < 1e-10);
    }
}
