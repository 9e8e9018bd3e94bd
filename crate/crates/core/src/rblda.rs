//! Regularized bilinear discriminant analysis.
//!
//! For each direction `l` the problem `(S_lt^{r_l})⁻¹ S_lb V_l = V_l Λ_l`
//! is solved independently, with `S_lt^{r} = (1 - r) S_lt + r σ_l² I` and
//! `σ_l² = tr(S_lt) / d_l`.
//!
//! Two implementations are provided:
//!
//! * [`rblda_fit_v1`] works in the original `d_l`-dimensional space and picks
//!   between a `d_l x d_l` whitened eigenproblem and a factor-side one.
//! * [`rblda_fit_v2`] first projects onto the range `U_lt` of the total
//!   scatter ([`rblda_precompute`]), where the regularized metric is the
//!   diagonal `Γ^r = (1 - r) Γ + r σ² I`. The projection does not depend on
//!   `r`, so one condensed SVD per direction serves every candidate
//!   ([`rblda_direction`]).
//!
//! Both pick the same route per direction: whitened when `d' c >= d_l`
//! (where `d'` is the other mode's size), factor side otherwise.

use crate::bilinear::{BilinearBasis, BilinearMethod};
use crate::error::{Direction, Error, Result};
use crate::matalg::{condensed_svd, negligible_spread, normalize_signs, scale_columns, spd_solve, sym_eig_full, Mat, Vector};
use crate::rlda::{check_regularization, finish_scaling, leading_pairs, Scaling};
use crate::scatter::{
    between_factor, centered_unfolding, class_averaging_operator, remove_block_means, ClassStats, MtsDataset,
};

/// Per-direction state shared by every regularization candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionCache {
    pub direction: Direction,
    /// `U_lt`, `d_l x t_l`.
    pub u_basis: Mat,
    /// `Γ_lt`, descending.
    pub gamma: Vector,
    pub sigma_sq: f64,
    /// `U_ltᵀ X_(l)`, `t_l x (d' n)`.
    pub projected_data: Mat,
    /// `F_lbu`, `t_l x (d' c)`.
    pub between_factor: Mat,
    /// `d'`, the size of the other mode.
    pub other_dim: usize,
    pub n_classes: usize,
}

impl DirectionCache {
    pub fn dim(&self) -> usize {
        self.u_basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.gamma.len()
    }

    /// True when the whitened `t x t` route is used (`d' c >= d_l`).
    pub fn uses_whitened_route(&self) -> bool {
        self.other_dim * self.n_classes >= self.dim()
    }
}

/// Both direction caches of one training set plus its mean.
#[derive(Debug, Clone, PartialEq)]
pub struct RbldaCaches {
    pub column: DirectionCache,
    pub row: DirectionCache,
    pub mean: Mat,
}

impl RbldaCaches {
    pub fn get(&self, direction: Direction) -> &DirectionCache {
        match direction {
            Direction::Column => &self.column,
            Direction::Row => &self.row,
        }
    }

    /// `U_1tᵀ (X - W) U_2t` for each observation.
    pub fn project_to_u_space(&self, data: &MtsDataset) -> Result<Vec<Mat>> {
        if data.dims() != self.mean.shape() {
            return Err(Error::input(format!(
                "data is {:?}, model expects {:?}",
                data.dims(),
                self.mean.shape()
            )));
        }
        let u1t = self.column.u_basis.transpose();
        Ok(data
            .observations()
            .iter()
            .map(|x| &u1t * (x - &self.mean) * &self.row.u_basis)
            .collect())
    }
}

/// Mean squared Frobenius norm of the raw observations, comparable with
/// the norm of a centered unfolding.
fn raw_energy(data: &MtsDataset, other: usize) -> f64 {
    data.observations().iter().map(|x| x.norm_squared()).sum::<f64>() / (data.len() * other) as f64
}

/// Condensed SVD of one direction's total scatter and the projected
/// between-class factor.
pub fn direction_cache(data: &MtsDataset, stats: &ClassStats, direction: Direction) -> Result<DirectionCache> {
    let d = data.dim(direction);
    let other = data.dims().0 * data.dims().1 / d;
    let unfolded = centered_unfolding(data, &stats.global_mean, direction);
    if negligible_spread(unfolded.norm_squared(), raw_energy(data, other)) {
        return Err(Error::degenerate(format!(
            "total scatter of the {direction} direction is zero"
        )));
    }
    let svd = condensed_svd(&unfolded)?;
    if svd.rank() == 0 {
        return Err(Error::degenerate(format!(
            "total scatter of the {direction} direction is zero"
        )));
    }
    let sigma_sq = unfolded.norm_squared() / d as f64;
    let projected = svd.left_basis.transpose() * &unfolded;
    let between = svd.left_basis.transpose() * between_factor(stats, direction);
    Ok(DirectionCache {
        direction,
        u_basis: svd.left_basis,
        gamma: svd.spectrum,
        sigma_sq,
        projected_data: projected,
        between_factor: between,
        other_dim: other,
        n_classes: stats.counts.len(),
    })
}

/// One condensed SVD per direction; the result is reused for every
/// `(r1, r2)` candidate.
pub fn rblda_precompute(data: &MtsDataset) -> Result<RbldaCaches> {
    let stats = ClassStats::compute(data)?;
    Ok(RbldaCaches {
        column: direction_cache(data, &stats, Direction::Column)?,
        row: direction_cache(data, &stats, Direction::Row)?,
        mean: stats.global_mean,
    })
}

/// Route selection for the reduced eigenproblem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenRoute {
    /// Whitened route when `d' c >= d_l`, factor route otherwise.
    #[default]
    Auto,
    /// `R = Γr^{-1/2} F Fᵀ Γr^{-1/2}`, size `t x t`.
    Whitened,
    /// `R = Fᵀ Γr⁻¹ F`, size `d'c x d'c`.
    Factor,
}

/// Discriminant basis of one direction in U-space (`t_l x q`) and its
/// eigenvalues (see [`crate::rlda::RldaBasis`] for which values are reported
/// per scaling).
pub fn rblda_direction(cache: &DirectionCache, r: f64, scaling: Scaling) -> Result<(Mat, Vector)> {
    rblda_direction_with(cache, r, scaling, EigenRoute::Auto)
}

pub fn rblda_direction_with(
    cache: &DirectionCache,
    r: f64,
    scaling: Scaling,
    route: EigenRoute,
) -> Result<(Mat, Vector)> {
    check_regularization(r)?;
    let metric = cache.gamma.map(|g| (1.0 - r) * g + r * cache.sigma_sq);
    let whitened = match route {
        EigenRoute::Auto => cache.uses_whitened_route(),
        EigenRoute::Whitened => true,
        EigenRoute::Factor => false,
    };
    let (t_basis, lambda) = if whitened {
        let inv_sqrt: Vec<f64> = metric.iter().map(|m| m.sqrt().recip()).collect();
        let mut a = cache.between_factor.clone();
        for (mut row, s) in a.row_iter_mut().zip(&inv_sqrt) {
            row *= *s;
        }
        let (v_r, lambda) = leading_pairs(&(&a * a.transpose()));
        let mut basis = v_r;
        for (mut row, s) in basis.row_iter_mut().zip(&inv_sqrt) {
            row *= *s;
        }
        (basis, lambda)
    } else {
        let mut g = cache.between_factor.clone();
        for (mut row, m) in g.row_iter_mut().zip(metric.iter()) {
            row /= *m;
        }
        let reduced = cache.between_factor.transpose() * &g;
        let (v_r, lambda) = leading_pairs(&reduced);
        let basis = scale_columns(&(g * v_r), lambda.iter().map(|l| l.sqrt().recip()));
        (basis, lambda)
    };
    finish_scaling(t_basis, lambda, r, scaling)
}

/// A fitted RBLDA model.
///
/// When `in_u_space` is set, `basis.v1` / `basis.v2` act on U-space
/// coordinates and `u1` / `u2` hold `U_1t` / `U_2t`; the original-space
/// bases are `U_lt V_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct RbldaModel {
    pub basis: BilinearBasis,
    pub r1: f64,
    pub r2: f64,
    pub scaling: Scaling,
    pub in_u_space: bool,
    pub u1: Option<Mat>,
    pub u2: Option<Mat>,
    pub mean: Mat,
}

impl RbldaModel {
    /// Original-space bases (`d1 x q1`, `d2 x q2`) under the usual sign
    /// convention, so columns may differ in sign from `U_lt V_l`.
    pub fn original_bases(&self) -> (Mat, Mat) {
        match (&self.u1, &self.u2) {
            (Some(u1), Some(u2)) if self.in_u_space => {
                let mut o1 = u1 * &self.basis.v1;
                let mut o2 = u2 * &self.basis.v2;
                normalize_signs(&mut o1);
                normalize_signs(&mut o2);
                (o1, o2)
            }
            _ => (self.basis.v1.clone(), self.basis.v2.clone()),
        }
    }
}

fn original_space_direction(
    data: &MtsDataset,
    stats: &ClassStats,
    direction: Direction,
    r: f64,
    scaling: Scaling,
) -> Result<(Mat, Vector)> {
    check_regularization(r)?;
    let d = data.dim(direction);
    let other = data.dims().0 * data.dims().1 / d;
    let c = stats.counts.len();
    let z = centered_unfolding(data, &stats.global_mean, direction);
    let m = z.ncols();
    let sigma_sq = z.norm_squared() / d as f64;
    if negligible_spread(z.norm_squared(), raw_energy(data, other)) {
        return Err(Error::degenerate(format!(
            "total scatter of the {direction} direction is zero"
        )));
    }
    let f = between_factor(stats, direction);

    let (t_basis, lambda) = if other * c >= d {
        // Full EVD of S_lt, including its null space.
        let eig = sym_eig_full(&(&z * z.transpose()));
        let inv_sqrt: Vec<f64> = eig
            .values
            .iter()
            .map(|g| ((1.0 - r) * g.max(0.0) + r * sigma_sq).sqrt().recip())
            .collect();
        let whitener = scale_columns(&eig.vectors, inv_sqrt);
        let a = whitener.transpose() * &f;
        let (v_r, lambda) = leading_pairs(&(&a * a.transpose()));
        (whitener * v_r, lambda)
    } else {
        let g = if other * data.len() < d {
            let mut t = z.transpose() * &z * (1.0 - r);
            for i in 0..m {
                t[(i, i)] += r * sigma_sq;
            }
            let mut rhs = class_averaging_operator(data.labels(), &stats.counts, other);
            remove_block_means(&mut rhs, other);
            &z * spd_solve(&t, &rhs)?
        } else {
            let mut s = &z * z.transpose() * (1.0 - r);
            for i in 0..d {
                s[(i, i)] += r * sigma_sq;
            }
            spd_solve(&s, &f)?
        };
        let reduced = f.transpose() * &g;
        let (v_r, lambda) = leading_pairs(&reduced);
        let basis = scale_columns(&(g * v_r), lambda.iter().map(|l| l.sqrt().recip()));
        (basis, lambda)
    };
    finish_scaling(t_basis, lambda, r, scaling)
}

/// Original-space implementation.
pub fn rblda_fit_v1(data: &MtsDataset, r1: f64, r2: f64, scaling: Scaling) -> Result<RbldaModel> {
    let stats = ClassStats::compute(data)?;
    let (v1, values1) = original_space_direction(data, &stats, Direction::Column, r1, scaling)?;
    let (v2, values2) = original_space_direction(data, &stats, Direction::Row, r2, scaling)?;
    Ok(RbldaModel {
        basis: BilinearBasis {
            v1,
            v2,
            values1,
            values2,
            method: BilinearMethod::Rblda,
        },
        r1,
        r2,
        scaling,
        in_u_space: false,
        u1: None,
        u2: None,
        mean: stats.global_mean,
    })
}

/// Model from precomputed caches for one `(r1, r2)` pair.
pub fn rblda_from_caches(caches: &RbldaCaches, r1: f64, r2: f64, scaling: Scaling) -> Result<RbldaModel> {
    let (v1, values1) = rblda_direction(&caches.column, r1, scaling)?;
    let (v2, values2) = rblda_direction(&caches.row, r2, scaling)?;
    Ok(RbldaModel {
        basis: BilinearBasis {
            v1,
            v2,
            values1,
            values2,
            method: BilinearMethod::Rblda,
        },
        r1,
        r2,
        scaling,
        in_u_space: true,
        u1: Some(caches.column.u_basis.clone()),
        u2: Some(caches.row.u_basis.clone()),
        mean: caches.mean.clone(),
    })
}

/// U-space implementation.
pub fn rblda_fit_v2(data: &MtsDataset, r1: f64, r2: f64, scaling: Scaling) -> Result<RbldaModel> {
    check_regularization(r1)?;
    check_regularization(r2)?;
    let caches = rblda_precompute(data)?;
    rblda_from_caches(&caches, r1, r2, scaling)
}
