//! JSON form of fitted models.

use rblda_core::{BilinearBasis, Mat, RbldaModel, RldaModel, Vector};
use serde::Serialize;

/// Row-major nested rows, so the JSON reads like the matrix it holds.
fn rows(m: &Mat) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn values(v: &Vector) -> Vec<f64> {
    v.iter().copied().collect()
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelFile {
    Bilinear {
        method: String,
        r1: Option<f64>,
        r2: Option<f64>,
        scaling: Option<String>,
        d1: usize,
        d2: usize,
        /// `d1 x q1` column basis in the original space.
        v1: Vec<Vec<f64>>,
        /// `d2 x q2` row basis in the original space.
        v2: Vec<Vec<f64>>,
        values1: Vec<f64>,
        values2: Vec<f64>,
        /// Training mean subtracted before projecting, when the method centers.
        mean: Option<Vec<Vec<f64>>>,
    },
    Vector {
        method: String,
        r: f64,
        scaling: String,
        d1: usize,
        d2: usize,
        /// `(d1 d2) x q` basis acting on column-stacked observations.
        basis: Vec<Vec<f64>>,
        values: Vec<f64>,
        mean: Vec<f64>,
    },
}

impl ModelFile {
    pub fn from_rblda(model: &RbldaModel) -> Self {
        let (v1, v2) = model.original_bases();
        ModelFile::Bilinear {
            method: model.basis.method.to_string(),
            r1: Some(model.r1),
            r2: Some(model.r2),
            scaling: Some(model.scaling.to_string()),
            d1: v1.nrows(),
            d2: v2.nrows(),
            v1: rows(&v1),
            v2: rows(&v2),
            values1: values(&model.basis.values1),
            values2: values(&model.basis.values2),
            mean: Some(rows(&model.mean)),
        }
    }

    pub fn from_bilinear(basis: &BilinearBasis) -> Self {
        ModelFile::Bilinear {
            method: basis.method.to_string(),
            r1: None,
            r2: None,
            scaling: None,
            d1: basis.v1.nrows(),
            d2: basis.v2.nrows(),
            v1: rows(&basis.v1),
            v2: rows(&basis.v2),
            values1: values(&basis.values1),
            values2: values(&basis.values2),
            mean: None,
        }
    }

    pub fn from_rlda(model: &RldaModel, dims: (usize, usize)) -> Self {
        ModelFile::Vector {
            method: "rlda".to_string(),
            r: model.basis.r,
            scaling: model.basis.scaling.to_string(),
            d1: dims.0,
            d2: dims.1,
            basis: rows(&model.basis.basis),
            values: values(&model.basis.values),
            mean: values(&model.mean),
        }
    }
}
