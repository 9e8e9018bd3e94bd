//! Feature extraction `Y = V1ᵀ X V2`, dimension truncation and the
//! 1-nearest-neighbor classifier.
//!
//! Vector features are stored as `q x 1` matrices so that bilinear and
//! vector methods share one representation.

use crate::bilinear::BilinearBasis;
use crate::error::{Error, Result};
use crate::matalg::{Mat, Vector};
use crate::rblda::RbldaModel;
use crate::rlda::RldaModel;
use crate::scatter::MtsDataset;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBlock {
    features: Vec<Mat>,
    labels: Vec<usize>,
    shape: (usize, usize),
}

impl FeatureBlock {
    pub fn new(features: Vec<Mat>, labels: Vec<usize>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::input(format!(
                "{} feature matrices but {} labels",
                features.len(),
                labels.len()
            )));
        }
        let shape = features.first().map(|f| f.shape()).unwrap_or((0, 0));
        if let Some(i) = features.iter().position(|f| f.shape() != shape) {
            return Err(Error::input(format!(
                "feature {i} is {:?}, expected {shape:?}",
                features[i].shape()
            )));
        }
        Ok(Self {
            features,
            labels,
            shape,
        })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// `(q1, q2)`; vector features are `(q, 1)`.
    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn features(&self) -> &[Mat] {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }
}

/// Anything that maps matrix observations to features.
pub trait Projector {
    fn project(&self, data: &MtsDataset) -> Result<FeatureBlock>;
}

fn check_dims(data: &MtsDataset, rows: usize, cols: usize) -> Result<()> {
    if data.dims() != (rows, cols) {
        return Err(Error::input(format!(
            "data is {:?}, projection expects ({rows}, {cols})",
            data.dims()
        )));
    }
    Ok(())
}

/// `(V1ᵀ (X - mean)) V2` for every observation.
pub fn project_bilinear(v1: &Mat, v2: &Mat, mean: Option<&Mat>, data: &MtsDataset) -> Result<FeatureBlock> {
    check_dims(data, v1.nrows(), v2.nrows())?;
    let v1t = v1.transpose();
    let features = data
        .observations()
        .iter()
        .map(|x| match mean {
            Some(m) => (&v1t * (x - m)) * v2,
            None => (&v1t * x) * v2,
        })
        .collect();
    FeatureBlock::new(features, data.labels().to_vec())
}

impl Projector for BilinearBasis {
    fn project(&self, data: &MtsDataset) -> Result<FeatureBlock> {
        project_bilinear(&self.v1, &self.v2, None, data)
    }
}

impl Projector for RbldaModel {
    /// U-space models first map to `U_1tᵀ (X - W) U_2t`; original-space
    /// bases are never formed.
    fn project(&self, data: &MtsDataset) -> Result<FeatureBlock> {
        match (&self.u1, &self.u2) {
            (Some(u1), Some(u2)) if self.in_u_space => {
                check_dims(data, u1.nrows(), u2.nrows())?;
                let u1t = u1.transpose();
                let reduced: Vec<Mat> = data
                    .observations()
                    .iter()
                    .map(|x| &u1t * (x - &self.mean) * u2)
                    .collect();
                project_u_space(&self.basis.v1, &self.basis.v2, &reduced, data.labels())
            }
            _ => project_bilinear(&self.basis.v1, &self.basis.v2, Some(&self.mean), data),
        }
    }
}

/// `(V1ᵀ Z) V2` on observations already expressed in U-space.
pub fn project_u_space(v1: &Mat, v2: &Mat, reduced: &[Mat], labels: &[usize]) -> Result<FeatureBlock> {
    let v1t = v1.transpose();
    let features = reduced.iter().map(|z| (&v1t * z) * v2).collect();
    FeatureBlock::new(features, labels.to_vec())
}

impl Projector for RldaModel {
    fn project(&self, data: &MtsDataset) -> Result<FeatureBlock> {
        let (d1, d2) = data.dims();
        if d1 * d2 != self.mean.len() {
            return Err(Error::input(format!(
                "data has {} entries per observation, model expects {}",
                d1 * d2,
                self.mean.len()
            )));
        }
        let bt = self.basis.basis.transpose();
        let features = data
            .observations()
            .iter()
            .map(|x| {
                let y = &bt * (Vector::from_column_slice(x.as_slice()) - &self.mean);
                Mat::from_column_slice(y.len(), 1, y.as_slice())
            })
            .collect();
        FeatureBlock::new(features, data.labels().to_vec())
    }
}

/// Keep the upper-left `q1 x q2` block of every feature matrix.
pub fn truncate(block: &FeatureBlock, q1: usize, q2: usize) -> Result<FeatureBlock> {
    let (r, c) = block.shape();
    if q1 > r || q2 > c {
        return Err(Error::input(format!("cannot truncate {r}x{c} features to {q1}x{q2}")));
    }
    Ok(FeatureBlock {
        features: block
            .features
            .iter()
            .map(|f| f.view((0, 0), (q1, q2)).into_owned())
            .collect(),
        labels: block.labels.clone(),
        shape: (q1, q2),
    })
}

fn check_pair(train: &FeatureBlock, test: &FeatureBlock) -> Result<()> {
    if train.is_empty() {
        return Err(Error::input("1NN needs at least one training observation"));
    }
    if test.is_empty() {
        return Err(Error::input("1NN needs at least one test observation"));
    }
    if train.shape() != test.shape() {
        return Err(Error::input(format!(
            "train features are {:?}, test features are {:?}",
            train.shape(),
            test.shape()
        )));
    }
    Ok(())
}

/// Index of the nearest training item; ties go to the smallest index.
pub fn nearest_neighbor(train: &FeatureBlock, query: &Mat) -> Result<usize> {
    if train.is_empty() {
        return Err(Error::input("1NN needs at least one training observation"));
    }
    let mut best = (f64::INFINITY, 0);
    for (j, f) in train.features.iter().enumerate() {
        let d = (f - query).norm_squared();
        if d < best.0 {
            best = (d, j);
        }
    }
    Ok(best.1)
}

/// Fraction of test items whose nearest training item has another label.
pub fn nn1_error(train: &FeatureBlock, test: &FeatureBlock) -> Result<f64> {
    check_pair(train, test)?;
    let mut wrong = 0usize;
    for (x, &y) in test.features.iter().zip(&test.labels) {
        if train.labels[nearest_neighbor(train, x)?] != y {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / test.len() as f64)
}

/// 1NN error for every truncation `(a, b)`, `1 <= a <= q1`, `1 <= b <= q2`,
/// stored at `(a - 1, b - 1)`. Squared distances for all truncations of one
/// pair come from a single 2-D prefix sum.
pub fn nn1_error_sweep(train: &FeatureBlock, test: &FeatureBlock) -> Result<Mat> {
    check_pair(train, test)?;
    let (q1, q2) = train.shape();
    let mut wrong = Mat::zeros(q1, q2);
    let mut best_dist = Mat::zeros(q1, q2);
    let mut best_label = vec![0usize; q1 * q2];
    let mut prefix = Mat::zeros(q1, q2);
    for (x, &y) in test.features.iter().zip(&test.labels) {
        best_dist.fill(f64::INFINITY);
        for (f, &label) in train.features.iter().zip(&train.labels) {
            for b in 0..q2 {
                let mut column = 0.0;
                for a in 0..q1 {
                    let diff = x[(a, b)] - f[(a, b)];
                    column += diff * diff;
                    let left = if b > 0 { prefix[(a, b - 1)] } else { 0.0 };
                    prefix[(a, b)] = left + column;
                }
            }
            for b in 0..q2 {
                for a in 0..q1 {
                    if prefix[(a, b)] < best_dist[(a, b)] {
                        best_dist[(a, b)] = prefix[(a, b)];
                        best_label[a + b * q1] = label;
                    }
                }
            }
        }
        for b in 0..q2 {
            for a in 0..q1 {
                if best_label[a + b * q1] != y {
                    wrong[(a, b)] += 1.0;
                }
            }
        }
    }
    Ok(wrong / test.len() as f64)
}
