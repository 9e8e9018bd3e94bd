//! Unregularized bilinear baselines: BLDA (whitened within-class scatter),
//! its pseudo-inverse variant PBLDA, and bilinear PCA.
//!
//! Both directions are solved separately; features are `Y = V1ᵀ X V2`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Direction, Error, Result};
use crate::matalg::{condensed_svd, scale_columns, sym_psd_eig, Mat, Vector};
use crate::rlda::leading_pairs;
use crate::scatter::{between_factor, bilinear_scatters, ClassStats, MtsDataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BilinearMethod {
    Blda,
    Pblda,
    Bpca,
    Rblda,
}

impl fmt::Display for BilinearMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BilinearMethod::Blda => "blda",
            BilinearMethod::Pblda => "pblda",
            BilinearMethod::Bpca => "bpca",
            BilinearMethod::Rblda => "rblda",
        })
    }
}

/// Column basis `v1` (`d1 x q1`) and row basis `v2` (`d2 x q2`).
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearBasis {
    pub v1: Mat,
    pub v2: Mat,
    pub values1: Vector,
    pub values2: Vector,
    pub method: BilinearMethod,
}

impl BilinearBasis {
    pub fn ranks(&self) -> (usize, usize) {
        (self.v1.ncols(), self.v2.ncols())
    }

    pub fn basis(&self, direction: Direction) -> &Mat {
        match direction {
            Direction::Column => &self.v1,
            Direction::Row => &self.v2,
        }
    }

    pub fn values(&self, direction: Direction) -> &Vector {
        match direction {
            Direction::Column => &self.values1,
            Direction::Row => &self.values2,
        }
    }

    /// Columns of both bases scaled to unit Euclidean norm.
    pub fn unit_columns(&self) -> Self {
        let unit = |m: &Mat| {
            let norms: Vec<f64> = m.column_iter().map(|c| c.norm()).collect();
            scale_columns(m, norms.into_iter().map(|n| if n > 0.0 { n.recip() } else { 1.0 }))
        };
        Self {
            v1: unit(&self.v1),
            v2: unit(&self.v2),
            ..self.clone()
        }
    }
}

/// `Strict` refuses singular within-class scatter (BLDA), `Pseudo` whitens
/// on its numerical range instead (PBLDA).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WhiteningMode {
    #[default]
    Strict,
    Pseudo,
}

impl FromStr for WhiteningMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(WhiteningMode::Strict),
            "pseudo" => Ok(WhiteningMode::Pseudo),
            other => Err(Error::input(format!("unknown whitening mode `{other}`"))),
        }
    }
}

/// Within-class unfolding `[X_i - W_{y_i}]` scaled so that `Z Zᵀ = S_lw`.
fn within_unfolding(data: &MtsDataset, stats: &ClassStats, direction: Direction) -> Mat {
    let d = data.dim(direction);
    let other = data.dims().0 * data.dims().1 / d;
    let scale = 1.0 / ((data.len() * other) as f64).sqrt();
    let mut out = Mat::zeros(d, other * data.len());
    for (i, (x, &y)) in data.observations().iter().zip(data.labels()).enumerate() {
        let dev = (x - &stats.class_means[y]) * scale;
        let block = match direction {
            Direction::Column => dev,
            Direction::Row => dev.transpose(),
        };
        out.columns_mut(i * other, other).copy_from(&block);
    }
    out
}

fn whitened_direction(
    data: &MtsDataset,
    stats: &ClassStats,
    direction: Direction,
    mode: WhiteningMode,
) -> Result<(Mat, Vector)> {
    let d = data.dim(direction);
    let within = condensed_svd(&within_unfolding(data, stats, direction))?;
    if mode == WhiteningMode::Strict && within.rank() < d {
        return Err(Error::SingularWithinClass {
            direction,
            rank: within.rank(),
            dim: d,
        });
    }
    // U Γ^{-1/2}
    let whitener = scale_columns(
        &within.left_basis,
        within.spectrum.iter().map(|g| g.sqrt().recip()),
    );
    let factor = whitener.transpose() * between_factor(stats, direction);
    let reduced = &factor * factor.transpose();
    let (v_r, values) = leading_pairs(&reduced);
    let mut basis = whitener * v_r;
    crate::matalg::normalize_signs(&mut basis);
    Ok((basis, values))
}

/// BLDA (`Strict`) or PBLDA (`Pseudo`).
///
/// Each direction maximizes `tr(Vᵀ S_lb V)` subject to `Vᵀ S_lw V = I`,
/// solved by whitening with the eigendecomposition of `S_lw`.
pub fn blda_fit(data: &MtsDataset, mode: WhiteningMode) -> Result<BilinearBasis> {
    let stats = ClassStats::compute(data)?;
    let (v1, values1) = whitened_direction(data, &stats, Direction::Column, mode)?;
    let (v2, values2) = whitened_direction(data, &stats, Direction::Row, mode)?;
    Ok(BilinearBasis {
        v1,
        v2,
        values1,
        values2,
        method: match mode {
            WhiteningMode::Strict => BilinearMethod::Blda,
            WhiteningMode::Pseudo => BilinearMethod::Pblda,
        },
    })
}

/// Numerical ranks of the two total scatter matrices.
pub fn total_scatter_ranks(data: &MtsDataset) -> Result<(usize, usize)> {
    let s = bilinear_scatters(data)?;
    Ok((sym_psd_eig(&s.s1t)?.len(), sym_psd_eig(&s.s2t)?.len()))
}

/// Bilinear PCA: leading `q1` / `q2` eigenvectors of the total scatters.
pub fn bpca_fit(data: &MtsDataset, q1: usize, q2: usize) -> Result<BilinearBasis> {
    let s = bilinear_scatters(data)?;
    let e1 = sym_psd_eig(&s.s1t)?;
    let e2 = sym_psd_eig(&s.s2t)?;
    if q1 > e1.len() || q2 > e2.len() {
        return Err(Error::input(format!(
            "requested ({q1}, {q2}) components but total scatter ranks are ({}, {})",
            e1.len(),
            e2.len()
        )));
    }
    Ok(BilinearBasis {
        v1: e1.vectors.columns(0, q1).into_owned(),
        v2: e2.vectors.columns(0, q2).into_owned(),
        values1: e1.values.rows(0, q1).into_owned(),
        values2: e2.values.rows(0, q2).into_owned(),
        method: BilinearMethod::Bpca,
    })
}
