//! V-fold cross-validated selection of the regularization parameters.
//!
//! Per fold, one condensed SVD per direction is computed on the training
//! part ([`rblda_precompute`]) and every grid cell reuses it. Both partitions
//! are mapped to U-space once, row-direction bases are solved once per
//! candidate, and each cell costs one small product plus a 1NN pass.

use rayon::prelude::*;

use crate::dataio::rng::SplitMix64;
use crate::error::{Direction, Error, Result};
use crate::features::{nn1_error, project_u_space, FeatureBlock};
use crate::matalg::{svd_invocations, Mat};
use crate::rblda::{direction_cache, rblda_direction, rblda_precompute};
use crate::rlda::Scaling;
use crate::scatter::{ClassStats, MtsDataset};

/// Ascending, distinct regularization candidates in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegGrid {
    values: Vec<f64>,
}

impl RegGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::input("regularization grid is empty"));
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && **v <= 1.0)) {
            return Err(Error::input(format!("grid value {v} outside (0, 1]")));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::input("grid values must be strictly increasing"));
        }
        Ok(Self { values })
    }

    /// `1e-6, 0.001, 0.01, 0.1, 0.2, ..., 0.9, 0.99`.
    pub fn standard() -> Self {
        let mut values = vec![1e-6, 1e-3, 1e-2];
        values.extend((1..=9).map(|i| i as f64 / 10.0));
        values.push(0.99);
        Self { values }
    }

    /// `i / m` for `i = 1..=m`.
    pub fn linspace(m: usize) -> Result<Self> {
        Self::new((1..=m).map(|i| i as f64 / m as f64).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Fold index in `[0, folds)` for every observation.
///
/// Each class is shuffled and dealt round-robin, starting where the previous
/// class stopped, so per-class fold sizes differ by at most one and total
/// fold sizes stay balanced.
pub fn stratified_folds(labels: &[usize], n_classes: usize, folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::input(format!("need at least 2 folds, got {folds}")));
    }
    let mut members = vec![Vec::new(); n_classes];
    for (i, &y) in labels.iter().enumerate() {
        if y >= n_classes {
            return Err(Error::input(format!("label {y} outside [0, {n_classes})")));
        }
        members[y].push(i);
    }
    if let Some(k) = members.iter().position(|m| m.len() < 2) {
        return Err(Error::input(format!(
            "class {k} has {} observation(s); every class needs at least 2 so that each training fold contains it",
            members[k].len()
        )));
    }
    let mut rng = SplitMix64::new(seed);
    let mut assignment = vec![0; labels.len()];
    let mut offset = 0;
    for class in &mut members {
        rng.shuffle(class);
        for (pos, &i) in class.iter().enumerate() {
            assignment[i] = (offset + pos) % folds;
        }
        offset = (offset + class.len()) % folds;
    }
    let mut sizes = vec![0usize; folds];
    for &f in &assignment {
        sizes[f] += 1;
    }
    if let Some(f) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::input(format!(
            "fold {f} is empty ({} observations for {folds} folds)",
            labels.len()
        )));
    }
    Ok(assignment)
}

/// Training and validation indices of one fold, ascending.
pub fn fold_indices(assignment: &[usize], fold: usize) -> (Vec<usize>, Vec<usize>) {
    (0..assignment.len()).partition(|&i| assignment[i] != fold)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CvMethod {
    /// Grid over `(r1, r2)`.
    Rblda,
    /// Single parameter on vectorized observations; `grid2` is ignored.
    Rlda,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvConfig {
    pub method: CvMethod,
    pub grid1: RegGrid,
    /// Defaults to `grid1`.
    pub grid2: Option<RegGrid>,
    pub folds: usize,
    pub seed: u64,
    pub scaling: Scaling,
    /// Folds evaluated concurrently; 0 or 1 runs on the calling thread.
    pub workers: usize,
}

impl CvConfig {
    pub fn new(method: CvMethod, grid: RegGrid) -> Self {
        Self {
            method,
            grid1: grid,
            grid2: None,
            folds: 5,
            seed: 0,
            scaling: Scaling::default(),
            workers: 1,
        }
    }

    pub fn grid2(&self) -> &RegGrid {
        self.grid2.as_ref().unwrap_or(&self.grid1)
    }
}

pub const TIE_POLICY: &str = "lexicographic-smallest";

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    /// `m1 x m2` mean validation error (`m1 x 1` for RLDA).
    pub error_grid: Mat,
    pub per_fold: Vec<Mat>,
    pub selected: (usize, usize),
    /// `(r1, r2)` at `selected`; `r2` is `None` for RLDA.
    pub selected_values: (f64, Option<f64>),
    pub grid1: Vec<f64>,
    pub grid2: Vec<f64>,
    pub folds: usize,
    pub seed: u64,
    pub scaling: Scaling,
    /// Condensed SVDs performed over all folds.
    pub svd_count: usize,
    pub tie_policy: &'static str,
}

/// First minimum in row-major order.
pub fn argmin_lexicographic(grid: &Mat) -> (usize, usize) {
    let mut best = (f64::INFINITY, (0, 0));
    for i in 0..grid.nrows() {
        for j in 0..grid.ncols() {
            if grid[(i, j)] < best.0 {
                best = (grid[(i, j)], (i, j));
            }
        }
    }
    best.1
}

fn check_fold_classes(train: &MtsDataset, fold: usize) -> Result<()> {
    let present = train.class_counts().iter().filter(|&&c| c > 0).count();
    if present < 2 {
        return Err(Error::FoldDegenerate {
            fold,
            reason: format!("training part contains {present} class(es)"),
        });
    }
    Ok(())
}

fn rblda_fold(train: &MtsDataset, valid: &MtsDataset, g1: &[f64], g2: &[f64], scaling: Scaling) -> Result<Mat> {
    let caches = rblda_precompute(train)?;
    let z_train = caches.project_to_u_space(train)?;
    let z_valid = caches.project_to_u_space(valid)?;
    let row_bases = g2
        .iter()
        .map(|&r| rblda_direction(&caches.row, r, scaling).map(|(v, _)| v))
        .collect::<Result<Vec<_>>>()?;
    let mut errors = Mat::zeros(g1.len(), g2.len());
    for (i, &r1) in g1.iter().enumerate() {
        let (v1, _) = rblda_direction(&caches.column, r1, scaling)?;
        let v1t = v1.transpose();
        let a_train: Vec<Mat> = z_train.iter().map(|z| &v1t * z).collect();
        let a_valid: Vec<Mat> = z_valid.iter().map(|z| &v1t * z).collect();
        for (j, v2) in row_bases.iter().enumerate() {
            let train_f = FeatureBlock::new(a_train.iter().map(|a| a * v2).collect(), train.labels().to_vec())?;
            let valid_f = FeatureBlock::new(a_valid.iter().map(|a| a * v2).collect(), valid.labels().to_vec())?;
            errors[(i, j)] = nn1_error(&train_f, &valid_f)?;
        }
    }
    Ok(errors)
}

fn rlda_fold(train: &MtsDataset, valid: &MtsDataset, g1: &[f64], scaling: Scaling) -> Result<Mat> {
    let train = train.as_vectors();
    let valid = valid.as_vectors();
    let stats = ClassStats::compute(&train)?;
    let cache = direction_cache(&train, &stats, Direction::Column)?;
    let ut = cache.u_basis.transpose();
    let reduce = |d: &MtsDataset| -> Vec<Mat> {
        d.observations().iter().map(|x| &ut * (x - &stats.global_mean)).collect()
    };
    let z_train = reduce(&train);
    let z_valid = reduce(&valid);
    let one = Mat::identity(1, 1);
    let mut errors = Mat::zeros(g1.len(), 1);
    for (i, &r) in g1.iter().enumerate() {
        let (v, _) = rblda_direction(&cache, r, scaling)?;
        let train_f = project_u_space(&v, &one, &z_train, train.labels())?;
        let valid_f = project_u_space(&v, &one, &z_valid, valid.labels())?;
        errors[(i, 0)] = nn1_error(&train_f, &valid_f)?;
    }
    Ok(errors)
}

/// Grid search; the selected cell minimizes the fold-averaged error, ties
/// going to the lexicographically smallest `(i, j)`.
pub fn cross_validate(data: &MtsDataset, config: &CvConfig) -> Result<CvReport> {
    let g1 = config.grid1.values().to_vec();
    let g2 = match config.method {
        CvMethod::Rblda => config.grid2().values().to_vec(),
        CvMethod::Rlda => Vec::new(),
    };
    let assignment = stratified_folds(data.labels(), data.n_classes(), config.folds, config.seed)?;

    let run_fold = |fold: usize| -> Result<(Mat, usize)> {
        let before = svd_invocations();
        let (train_idx, valid_idx) = fold_indices(&assignment, fold);
        let train = data.subset(&train_idx);
        let valid = data.subset(&valid_idx);
        check_fold_classes(&train, fold)?;
        let errors = match config.method {
            CvMethod::Rblda => rblda_fold(&train, &valid, &g1, &g2, config.scaling),
            CvMethod::Rlda => rlda_fold(&train, &valid, &g1, config.scaling),
        }
        .map_err(|e| match e {
            Error::Degenerate(reason) => Error::FoldDegenerate { fold, reason },
            other => other,
        })?;
        Ok((errors, svd_invocations() - before))
    };

    let results: Vec<Result<(Mat, usize)>> = if config.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::input(format!("cannot start worker pool: {e}")))?;
        pool.install(|| (0..config.folds).into_par_iter().map(run_fold).collect())
    } else {
        (0..config.folds).map(run_fold).collect()
    };

    let mut per_fold = Vec::with_capacity(config.folds);
    let mut svd_count = 0;
    for r in results {
        let (errors, svds) = r?;
        per_fold.push(errors);
        svd_count += svds;
    }
    let mut error_grid = Mat::zeros(per_fold[0].nrows(), per_fold[0].ncols());
    for e in &per_fold {
        error_grid += e;
    }
    error_grid /= config.folds as f64;

    let selected = argmin_lexicographic(&error_grid);
    let selected_values = (
        g1[selected.0],
        match config.method {
            CvMethod::Rblda => Some(g2[selected.1]),
            CvMethod::Rlda => None,
        },
    );
    Ok(CvReport {
        error_grid,
        per_fold,
        selected,
        selected_values,
        grid1: g1,
        grid2: g2,
        folds: config.folds,
        seed: config.seed,
        scaling: config.scaling,
        svd_count,
        tie_policy: TIE_POLICY,
    })
}
