//! Matrix-valued datasets, class statistics and scatter matrices.
//!
//! Block-indicator formulations (class-membership blocks, diagonal count
//! blocks, centering projectors) are never materialized here. Everything is
//! accumulated from class means, which gives the same matrices with memory
//! linear in the data.

use crate::error::{Direction, Error, ParseErrorKind, Result};
use crate::matalg::{ensure_finite, Mat};

/// `n` labelled observations, each a `d1 x d2` matrix, drawn from `c` classes.
#[derive(Debug, Clone, PartialEq)]
pub struct MtsDataset {
    rows: usize,
    cols: usize,
    n_classes: usize,
    observations: Vec<Mat>,
    labels: Vec<usize>,
}

impl MtsDataset {
    /// Builds a dataset, checking shapes, labels and finiteness. Classes may
    /// be empty here (a held-out partition need not contain every class); use
    /// [`MtsDataset::require_all_classes`] where that matters.
    pub fn new(
        rows: usize,
        cols: usize,
        n_classes: usize,
        observations: Vec<Mat>,
        labels: Vec<usize>,
    ) -> Result<Self> {
        if observations.len() != labels.len() {
            return Err(Error::input(format!(
                "{} observations but {} labels",
                observations.len(),
                labels.len()
            )));
        }
        if rows == 0 || cols == 0 {
            return Err(Error::input("observation dimensions must be positive"));
        }
        for (i, (x, &y)) in observations.iter().zip(&labels).enumerate() {
            if x.shape() != (rows, cols) {
                return Err(Error::input(format!(
                    "observation {i} is {}x{}, expected {rows}x{cols}",
                    x.nrows(),
                    x.ncols()
                )));
            }
            if y >= n_classes {
                return Err(Error::input(format!(
                    "label {y} of observation {i} outside [0, {n_classes})"
                )));
            }
            ensure_finite(x, "observation")?;
        }
        Ok(Self {
            rows,
            cols,
            n_classes,
            observations,
            labels,
        })
    }

    /// Like [`MtsDataset::new`] with the shape taken from the first observation.
    pub fn from_observations(observations: Vec<Mat>, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        let (rows, cols) = observations
            .first()
            .map(|x| x.shape())
            .ok_or_else(|| Error::input("dataset has no observations"))?;
        Self::new(rows, cols, n_classes, observations, labels)
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// `(d1, d2)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn dim(&self, direction: Direction) -> usize {
        match direction {
            Direction::Column => self.rows,
            Direction::Row => self.cols,
        }
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn observations(&self) -> &[Mat] {
        &self.observations
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &y in &self.labels {
            counts[y] += 1;
        }
        counts
    }

    /// Fails with the first empty class, if any.
    pub fn require_all_classes(&self) -> Result<()> {
        match self.class_counts().iter().position(|&n| n == 0) {
            Some(k) => Err(Error::input(format!("class {k} has no observations"))),
            None => Ok(()),
        }
    }

    pub(crate) fn first_empty_class(&self) -> Option<usize> {
        self.class_counts().iter().position(|&n| n == 0)
    }

    pub(crate) fn empty_class_parse_error(&self, line: usize) -> Option<Error> {
        self.first_empty_class().map(|k| Error::Parse {
            line,
            kind: ParseErrorKind::EmptyClass(k),
        })
    }

    /// Observations at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            n_classes: self.n_classes,
            observations: indices.iter().map(|&i| self.observations[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Same labels, observations replaced by `f(x)`; the new shape is taken
    /// from the output.
    pub fn map(&self, f: impl Fn(&Mat) -> Mat) -> Result<Self> {
        let observations: Vec<Mat> = self.observations.iter().map(f).collect();
        let (rows, cols) = observations.first().map(|x| x.shape()).unwrap_or((self.rows, self.cols));
        Self::new(rows, cols, self.n_classes, observations, self.labels.clone())
    }

    /// Column-major `vec(X_i)` stacked as the columns of a `d1*d2 x n` matrix.
    pub fn vectorized(&self) -> Mat {
        let d = self.rows * self.cols;
        let mut out = Mat::zeros(d, self.len());
        for (j, x) in self.observations.iter().enumerate() {
            out.column_mut(j).copy_from_slice(x.as_slice());
        }
        out
    }

    /// Each observation reshaped to a `d1*d2 x 1` column.
    pub fn as_vectors(&self) -> Self {
        let d = self.rows * self.cols;
        Self {
            rows: d,
            cols: 1,
            n_classes: self.n_classes,
            observations: self
                .observations
                .iter()
                .map(|x| Mat::from_column_slice(d, 1, x.as_slice()))
                .collect(),
            labels: self.labels.clone(),
        }
    }

    /// Every observation tiled `times` times along the row (time) direction.
    pub fn replicate_rows(&self, times: usize) -> Self {
        let rows = self.rows * times.max(1);
        Self {
            rows,
            cols: self.cols,
            n_classes: self.n_classes,
            observations: self
                .observations
                .iter()
                .map(|x| Mat::from_fn(rows, self.cols, |r, c| x[(r % self.rows, c)]))
                .collect(),
            labels: self.labels.clone(),
        }
    }
}

/// Global and per-class sample means.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassStats {
    pub global_mean: Mat,
    pub class_means: Vec<Mat>,
    pub counts: Vec<usize>,
}

impl ClassStats {
    pub fn compute(data: &MtsDataset) -> Result<Self> {
        data.require_all_classes()?;
        let (d1, d2) = data.dims();
        let mut sums = vec![Mat::zeros(d1, d2); data.n_classes()];
        let mut total = Mat::zeros(d1, d2);
        for (x, &y) in data.observations().iter().zip(data.labels()) {
            sums[y] += x;
            total += x;
        }
        let counts = data.class_counts();
        let class_means = sums
            .into_iter()
            .zip(&counts)
            .map(|(s, &n)| s / n as f64)
            .collect();
        Ok(Self {
            global_mean: total / data.len() as f64,
            class_means,
            counts,
        })
    }

    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Subtract the global mean. Returns the centered data and the mean, which
/// must also be subtracted from any held-out data.
pub fn center_dataset(data: &MtsDataset) -> Result<(MtsDataset, Mat)> {
    if data.is_empty() {
        return Err(Error::input("cannot center an empty dataset"));
    }
    let (d1, d2) = data.dims();
    let mut mean = Mat::zeros(d1, d2);
    for x in data.observations() {
        mean += x;
    }
    mean /= data.len() as f64;
    let centered = data.map(|x| x - &mean)?;
    Ok((centered, mean))
}

/// Between-, within- and total scatter of vector observations.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorScatter {
    pub between: Mat,
    pub within: Mat,
    pub total: Mat,
}

/// Scatter matrices of the columns of `x` (`d x n`), each scaled by `1/n`.
pub fn vector_scatters(x: &Mat, labels: &[usize], n_classes: usize) -> Result<VectorScatter> {
    let (d, n) = x.shape();
    if labels.len() != n {
        return Err(Error::input(format!("{n} columns but {} labels", labels.len())));
    }
    if n == 0 {
        return Err(Error::input("no observations"));
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

    let mean = x.column_mean();
    let mut class_means = Mat::zeros(d, n_classes);
    for (j, &y) in labels.iter().enumerate() {
        let mut col = class_means.column_mut(y);
        col += x.column(j);
    }
    for (k, &nk) in counts.iter().enumerate() {
        let mut col = class_means.column_mut(k);
        col /= nk as f64;
    }

    let mut between = Mat::zeros(d, d);
    for (k, &nk) in counts.iter().enumerate() {
        let diff = class_means.column(k) - &mean;
        between.ger(nk as f64, &diff, &diff, 1.0);
    }
    let mut within_dev = x.clone();
    let mut total_dev = x.clone();
    for (j, &y) in labels.iter().enumerate() {
        let mut w = within_dev.column_mut(j);
        w -= class_means.column(y);
        let mut t = total_dev.column_mut(j);
        t -= &mean;
    }
    let inv_n = 1.0 / n as f64;
    Ok(VectorScatter {
        between: between * inv_n,
        within: &within_dev * within_dev.transpose() * inv_n,
        total: &total_dev * total_dev.transpose() * inv_n,
    })
}

/// The six column-column / row-row scatter matrices of a matrix dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearScatter {
    pub s1w: Mat,
    pub s1b: Mat,
    pub s1t: Mat,
    pub s2w: Mat,
    pub s2b: Mat,
    pub s2t: Mat,
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
}

impl BilinearScatter {
    pub fn within(&self, direction: Direction) -> &Mat {
        match direction {
            Direction::Column => &self.s1w,
            Direction::Row => &self.s2w,
        }
    }

    pub fn between(&self, direction: Direction) -> &Mat {
        match direction {
            Direction::Column => &self.s1b,
            Direction::Row => &self.s2b,
        }
    }

    pub fn total(&self, direction: Direction) -> &Mat {
        match direction {
            Direction::Column => &self.s1t,
            Direction::Row => &self.s2t,
        }
    }

    pub fn sigma_sq(&self, direction: Direction) -> f64 {
        match direction {
            Direction::Column => self.sigma1_sq,
            Direction::Row => self.sigma2_sq,
        }
    }
}

/// Column-column scatters carry `1/(n d2)`, row-row scatters `1/(n d1)`.
/// Input need not be centered.
pub fn bilinear_scatters(data: &MtsDataset) -> Result<BilinearScatter> {
    let stats = ClassStats::compute(data)?;
    let (d1, d2) = data.dims();
    let n = data.len() as f64;
    let c1 = 1.0 / (n * d2 as f64);
    let c2 = 1.0 / (n * d1 as f64);

    let mut s1w = Mat::zeros(d1, d1);
    let mut s2w = Mat::zeros(d2, d2);
    let mut s1t = Mat::zeros(d1, d1);
    let mut s2t = Mat::zeros(d2, d2);
    for (x, &y) in data.observations().iter().zip(data.labels()) {
        let w = x - &stats.class_means[y];
        s1w.gemm(c1, &w, &w.transpose(), 1.0);
        s2w.gemm(c2, &w.transpose(), &w, 1.0);
        let t = x - &stats.global_mean;
        s1t.gemm(c1, &t, &t.transpose(), 1.0);
        s2t.gemm(c2, &t.transpose(), &t, 1.0);
    }
    let mut s1b = Mat::zeros(d1, d1);
    let mut s2b = Mat::zeros(d2, d2);
    for (mean, &nk) in stats.class_means.iter().zip(&stats.counts) {
        let b = mean - &stats.global_mean;
        s1b.gemm(c1 * nk as f64, &b, &b.transpose(), 1.0);
        s2b.gemm(c2 * nk as f64, &b.transpose(), &b, 1.0);
    }
    let sigma1_sq = s1t.trace() / d1 as f64;
    let sigma2_sq = s2t.trace() / d2 as f64;
    Ok(BilinearScatter {
        s1w,
        s1b,
        s1t,
        s2w,
        s2b,
        s2t,
        sigma1_sq,
        sigma2_sq,
    })
}

fn oriented(x: &Mat, direction: Direction) -> Mat {
    match direction {
        Direction::Column => x.clone(),
        Direction::Row => x.transpose(),
    }
}

/// Mode unfolding `[X_1 - W, ..., X_n - W]` (column direction) or
/// `[(X_1 - W)ᵀ, ..., (X_n - W)ᵀ]` (row direction), scaled so that its Gram
/// product `Z Zᵀ` equals the total scatter of that direction.
pub fn centered_unfolding(data: &MtsDataset, mean: &Mat, direction: Direction) -> Mat {
    let d = data.dim(direction);
    let other = data.dims().0 * data.dims().1 / d;
    let n = data.len();
    let scale = 1.0 / ((n * other) as f64).sqrt();
    let mut out = Mat::zeros(d, other * n);
    for (i, x) in data.observations().iter().enumerate() {
        let block = oriented(&(x - mean), direction) * scale;
        out.columns_mut(i * other, other).copy_from(&block);
    }
    out
}

/// Between-class factor `F` with `F Fᵀ` equal to the between-class scatter of
/// `direction`: block `k` is `sqrt(n_k) (W_k - W) / sqrt(n d')`, oriented.
pub fn between_factor(stats: &ClassStats, direction: Direction) -> Mat {
    let oriented_means: Vec<Mat> = stats
        .class_means
        .iter()
        .map(|m| oriented(&(m - &stats.global_mean), direction))
        .collect();
    let (d, other) = oriented_means
        .first()
        .map(|m| m.shape())
        .unwrap_or((0, 0));
    let n = stats.n();
    let scale = 1.0 / ((n * other) as f64).sqrt();
    let mut out = Mat::zeros(d, other * oriented_means.len());
    for (k, (m, &nk)) in oriented_means.iter().zip(&stats.counts).enumerate() {
        out.columns_mut(k * other, other)
            .copy_from(&(m * ((nk as f64).sqrt() * scale)));
    }
    out
}

/// Dense `(d' n) x (d' c)` class-averaging operator: block `(i, k)` is
/// `I / sqrt(n_k)` when observation `i` is in class `k`. Multiplying an
/// unfolding by it yields the between-class factor (right-hand side of the
/// Gram-side solves).
pub fn class_averaging_operator(labels: &[usize], counts: &[usize], block: usize) -> Mat {
    let mut out = Mat::zeros(block * labels.len(), block * counts.len());
    for (i, &y) in labels.iter().enumerate() {
        let w = 1.0 / (counts[y] as f64).sqrt();
        for b in 0..block {
            out[(i * block + b, y * block + b)] = w;
        }
    }
    out
}

/// Subtract, for each within-block offset `b`, the mean over observations
/// of rows `i * block + b`. The result is orthogonal to the null vectors
/// that every centered unfolding has, so a Gram-side solve against it does
/// not pick up large components that the final product cancels.
pub(crate) fn remove_block_means(m: &mut Mat, block: usize) {
    let n = m.nrows() / block;
    for mut col in m.column_iter_mut() {
        for b in 0..block {
            let mean = (0..n).map(|i| col[i * block + b]).sum::<f64>() / n as f64;
            for i in 0..n {
                col[i * block + b] -= mean;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::rng::SplitMix64;

    fn random_dataset(seed: u64, d1: usize, d2: usize, n: usize, c: usize) -> MtsDataset {
        let mut rng = SplitMix64::new(seed);
        let obs = (0..n)
            .map(|_| Mat::from_fn(d1, d2, |_, _| rng.next_gaussian()))
            .collect();
        let labels = (0..n).map(|i| i % c).collect();
        MtsDataset::new(d1, d2, c, obs, labels).unwrap()
    }

    #[test]
    fn single_observation_centers_to_zero() {
        let x = Mat::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let data = MtsDataset::from_observations(vec![x.clone()], vec![0], 1).unwrap();
        let (centered, mean) = center_dataset(&data).unwrap();
        assert_eq!(mean, x);
        assert_eq!(centered.observations()[0], Mat::zeros(2, 2));
    }

    #[test]
    fn symmetric_pair_is_already_centered() {
        let x = Mat::from_row_slice(2, 1, &[1.5, -2.0]);
        let data = MtsDataset::from_observations(vec![x.clone(), -x.clone()], vec![0, 1], 2).unwrap();
        let (centered, mean) = center_dataset(&data).unwrap();
        assert_eq!(mean, Mat::zeros(2, 1));
        assert_eq!(centered, data);
    }

    #[test]
    fn centered_columns_sum_to_zero() {
        let data = random_dataset(5, 3, 4, 5, 2);
        let (centered, _) = center_dataset(&data).unwrap();
        let mut sum = Mat::zeros(3, 4);
        for x in centered.observations() {
            sum += x;
        }
        assert!(sum.amax() < 1e-12);
    }

    #[test]
    fn two_point_vector_scatter() {
        let x = Mat::from_row_slice(1, 2, &[0.0, 2.0]);
        let s = vector_scatters(&x, &[0, 1], 2).unwrap();
        assert_eq!(s.between[(0, 0)], 1.0);
        assert_eq!(s.within[(0, 0)], 0.0);
        assert_eq!(s.total[(0, 0)], 1.0);
    }

    #[test]
    fn constant_data_has_zero_scatter() {
        let x = Mat::from_element(3, 6, 2.5);
        let s = vector_scatters(&x, &[0, 1, 2, 0, 1, 2], 3).unwrap();
        assert!(s.between.amax() < 1e-28);
        assert!(s.within.amax() < 1e-28);
        assert!(s.total.amax() < 1e-28);
    }

    #[test]
    fn vector_additivity() {
        let data = random_dataset(11, 4, 1, 12, 3);
        let s = vector_scatters(&data.vectorized(), data.labels(), 3).unwrap();
        assert!((&s.total - (&s.between + &s.within)).amax() <= 1e-12);
    }

    #[test]
    fn empty_class_rejected() {
        let x = Mat::zeros(2, 3);
        assert!(vector_scatters(&x, &[0, 0, 0], 2).is_err());
        let data = MtsDataset::new(2, 1, 2, vec![Mat::zeros(2, 1)], vec![0]).unwrap();
        assert!(bilinear_scatters(&data).is_err());
    }

    #[test]
    fn equal_class_means_give_zero_between() {
        let a = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let obs = vec![a.clone(), -a.clone(), a.clone(), -a.clone()];
        let data = MtsDataset::from_observations(obs, vec![0, 0, 1, 1], 2).unwrap();
        let s = bilinear_scatters(&data).unwrap();
        assert_eq!(s.s1b.amax(), 0.0);
        assert_eq!(s.s2b.amax(), 0.0);
    }

    #[test]
    fn total_scatter_matches_naive_loop() {
        let data = random_dataset(21, 6, 4, 15, 3);
        let s = bilinear_scatters(&data).unwrap();
        let n = data.len();
        let mut w = Mat::zeros(6, 4);
        for x in data.observations() {
            w += x;
        }
        w /= n as f64;
        let mut naive = Mat::zeros(6, 6);
        for x in data.observations() {
            for r in 0..6 {
                for c in 0..6 {
                    let mut acc = 0.0;
                    for j in 0..4 {
                        acc += (x[(r, j)] - w[(r, j)]) * (x[(c, j)] - w[(c, j)]);
                    }
                    naive[(r, c)] += acc / (n * 4) as f64;
                }
            }
        }
        assert!((&s.s1t - naive).amax() < 1e-12);
        assert!((s.sigma1_sq - s.s1t.trace() / 6.0).abs() < 1e-15);
    }

    #[test]
    fn unfolding_and_factor_reproduce_scatter() {
        let data = random_dataset(3, 5, 3, 9, 3);
        let stats = ClassStats::compute(&data).unwrap();
        let s = bilinear_scatters(&data).unwrap();
        for dir in Direction::BOTH {
            let z = centered_unfolding(&data, &stats.global_mean, dir);
            assert!((&z * z.transpose() - s.total(dir)).amax() < 1e-12);
            let f = between_factor(&stats, dir);
            assert!((&f * f.transpose() - s.between(dir)).amax() < 1e-12);
            let counts = stats.counts.clone();
            let other = 15 / data.dim(dir);
            let e = class_averaging_operator(data.labels(), &counts, other);
            assert!((&z * e - &f).amax() < 1e-12);
        }
    }

    #[test]
    fn weighted_mean_identity() {
        let data = random_dataset(8, 3, 3, 10, 3);
        let stats = ClassStats::compute(&data).unwrap();
        let mut acc = Mat::zeros(3, 3);
        for (m, &nk) in stats.class_means.iter().zip(&stats.counts) {
            acc += m * nk as f64;
        }
        assert!((acc - &stats.global_mean * 10.0).amax() < 1e-10);
    }

    #[test]
    fn replicate_rows_tiles() {
        let x = Mat::from_row_slice(2, 1, &[1.0, 2.0]);
        let data = MtsDataset::from_observations(vec![x], vec![0], 1).unwrap();
        let rep = data.replicate_rows(3);
        assert_eq!(rep.dims(), (6, 1));
        assert_eq!(rep.observations()[0].as_slice(), &[1.0, 2.0, 1.0, 2.0, 1.0, 2.0]);
    }
}
