//! End-to-end evaluation protocol and the model-selection benchmark.
//!
//! Per split: stratified random split, cross-validated choice of the
//! regularization parameters on the training part, refit on the whole
//! training part, then 1NN test error for every truncation `(a, b)` of the
//! extracted features. Splits are summarized at the truncation with the
//! lowest mean error.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bilinear::{blda_fit, bpca_fit, total_scatter_ranks, BilinearBasis, WhiteningMode};
use crate::dataio::{random_split, Proportion, SplitSpec};
use crate::error::{Error, ErrorCategory, Result};
use crate::features::{nn1_error, nn1_error_sweep, truncate, FeatureBlock, Projector};
use crate::matalg::Mat;
use crate::modelsel::{cross_validate, CvConfig, CvMethod, RegGrid};
use crate::rblda::rblda_fit_v2;
use crate::rlda::{fit_rlda, Scaling};
use crate::scatter::MtsDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rblda,
    Rlda,
    Blda,
    Pblda,
    Bpca,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Rblda => "rblda",
            Method::Rlda => "rlda",
            Method::Blda => "blda",
            Method::Pblda => "pblda",
            Method::Bpca => "bpca",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rblda" => Ok(Method::Rblda),
            "rlda" => Ok(Method::Rlda),
            "blda" => Ok(Method::Blda),
            "pblda" => Ok(Method::Pblda),
            "bpca" => Ok(Method::Bpca),
            other => Err(Error::input(format!(
                "unknown method `{other}` (expected rblda, rlda, blda, pblda or bpca)"
            ))),
        }
    }
}

/// Which basis normalization(s) to evaluate. `Best` runs the w-orthogonal
/// and unit-column variants and reports the better one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingPolicy {
    #[default]
    W,
    T,
    Unit,
    Best,
}

impl FromStr for ScalingPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "w" => Ok(ScalingPolicy::W),
            "t" => Ok(ScalingPolicy::T),
            "unit" => Ok(ScalingPolicy::Unit),
            "best" => Ok(ScalingPolicy::Best),
            other => Err(Error::input(format!("unknown scaling policy `{other}`"))),
        }
    }
}

impl ScalingPolicy {
    fn scalings(self, method: Method) -> Vec<Scaling> {
        match (method, self) {
            (Method::Bpca, _) => vec![Scaling::UnitColumn],
            (_, ScalingPolicy::W) => vec![Scaling::WOrthogonal],
            (_, ScalingPolicy::T) => vec![Scaling::TOrthogonal],
            (_, ScalingPolicy::Unit) => vec![Scaling::UnitColumn],
            (_, ScalingPolicy::Best) => vec![Scaling::WOrthogonal, Scaling::UnitColumn],
        }
    }
}

fn default_proportion() -> Proportion {
    Proportion::new(1, 2).expect("valid proportion")
}

fn default_splits() -> usize {
    10
}

fn default_folds() -> usize {
    5
}

fn default_workers() -> usize {
    1
}

/// Evaluation settings; every field has a default so a TOML file only needs
/// to name what differs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub data: Option<std::path::PathBuf>,
    /// Optional fixed test set; splits then only subsample the training data.
    #[serde(default)]
    pub test_data: Option<std::path::PathBuf>,
    pub method: Method,
    #[serde(default = "default_proportion")]
    pub train_proportion: Proportion,
    #[serde(default = "default_splits")]
    pub splits: usize,
    #[serde(default = "default_folds")]
    pub folds: usize,
    /// Candidates for `r1` (and `r` for RLDA); the standard 13-value grid
    /// when absent.
    #[serde(default)]
    pub grid: Option<Vec<f64>>,
    #[serde(default)]
    pub grid2: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub scaling: ScalingPolicy,
    /// Splits evaluated concurrently.
    #[serde(default = "default_workers")]
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn new(method: Method) -> Self {
        Self {
            data: None,
            test_data: None,
            method,
            train_proportion: default_proportion(),
            splits: default_splits(),
            folds: default_folds(),
            grid: None,
            grid2: None,
            seed: 0,
            scaling: ScalingPolicy::default(),
            workers: default_workers(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::input(format!("invalid config: {e}")))
    }

    fn grids(&self) -> Result<(RegGrid, Option<RegGrid>)> {
        let g1 = match &self.grid {
            Some(v) => RegGrid::new(v.clone())?,
            None => RegGrid::standard(),
        };
        let g2 = self.grid2.clone().map(RegGrid::new).transpose()?;
        Ok((g1, g2))
    }
}

/// Outcome of one split for one scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitOutcome {
    pub split: usize,
    /// Test error for truncation `(a, b)` at `(a - 1, b - 1)`.
    pub sweep: Mat,
    /// Test error with all features dropped (every test item gets the label
    /// of the first training item).
    pub empty_error: f64,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
}

impl SplitOutcome {
    fn error_at(&self, (a, b): (usize, usize)) -> f64 {
        if a == 0 || b == 0 {
            self.empty_error
        } else {
            self.sweep[(a - 1, b - 1)]
        }
    }
}

/// Results of one scaling over all splits.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSummary {
    pub scaling: Scaling,
    pub outcomes: Vec<SplitOutcome>,
    pub dims: (usize, usize),
    pub mean_error: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MethodOutcome {
    Evaluated {
        summaries: Vec<ScalingSummary>,
        /// Index into `summaries` with the lowest mean error.
        best: usize,
    },
    /// The method cannot run on this data (singular within-class scatter).
    Unavailable { reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub method: Method,
    pub proportion: Proportion,
    pub policy: ScalingPolicy,
    pub outcome: MethodOutcome,
}

impl ExperimentReport {
    pub fn is_unavailable(&self) -> bool {
        matches!(self.outcome, MethodOutcome::Unavailable { .. })
    }
}

pub const CSV_HEADER: &str = "method,p,scaling,row,split,error,std,q1,q2,r1,r2,status";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ExperimentReport {
    /// One `split` row per split and scaling, one `summary` row per scaling,
    /// and for the `best` policy a final summary row labelled `best`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        let prefix = format!("{},{}", self.method, self.proportion);
        match &self.outcome {
            MethodOutcome::Unavailable { .. } => {
                let _ = writeln!(out, "{prefix},,summary,,,,,,,,unavailable");
            }
            MethodOutcome::Evaluated { summaries, best } => {
                for s in summaries {
                    let sc = s.scaling.as_str();
                    for o in &s.outcomes {
                        let _ = writeln!(
                            out,
                            "{prefix},{sc},split,{},{},,{},{},{},{},ok",
                            o.split,
                            o.error_at(s.dims),
                            s.dims.0,
                            s.dims.1,
                            opt(o.r1),
                            opt(o.r2)
                        );
                    }
                    let _ = writeln!(
                        out,
                        "{prefix},{sc},summary,,{},{},{},{},,,ok",
                        s.mean_error, s.std_error, s.dims.0, s.dims.1
                    );
                }
                if self.policy == ScalingPolicy::Best {
                    let s = &summaries[*best];
                    let _ = writeln!(
                        out,
                        "{prefix},best,summary,,{},{},{},{},,,ok",
                        s.mean_error, s.std_error, s.dims.0, s.dims.1
                    );
                }
            }
        }
        out
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, std)
}

/// Truncation with the lowest mean error over splits, among those available
/// in every split. Ties go to the smaller `a * b`, then to the smaller `a`.
fn summarize(scaling: Scaling, outcomes: Vec<SplitOutcome>) -> ScalingSummary {
    let q1 = outcomes.iter().map(|o| o.sweep.nrows()).min().unwrap_or(0);
    let q2 = outcomes.iter().map(|o| o.sweep.ncols()).min().unwrap_or(0);
    let mut candidates: Vec<(usize, usize)> = (1..=q1).flat_map(|a| (1..=q2).map(move |b| (a, b))).collect();
    if candidates.is_empty() {
        candidates.push((0, 0));
    }
    candidates.sort_by_key(|&(a, b)| (a * b, a, b));
    let mut best = None;
    for dims in candidates {
        let errors: Vec<f64> = outcomes.iter().map(|o| o.error_at(dims)).collect();
        let (mean, std) = mean_std(&errors);
        if best.as_ref().is_none_or(|&(m, _, _)| mean < m) {
            best = Some((mean, std, dims));
        }
    }
    let (mean_error, std_error, dims) = best.expect("at least one candidate");
    ScalingSummary {
        scaling,
        outcomes,
        dims,
        mean_error,
        std_error,
    }
}

fn sweep_outcome(
    split: usize,
    train: &FeatureBlock,
    test: &FeatureBlock,
    r1: Option<f64>,
    r2: Option<f64>,
) -> Result<SplitOutcome> {
    let (q1, q2) = train.shape();
    let sweep = if q1 > 0 && q2 > 0 {
        nn1_error_sweep(train, test)?
    } else {
        Mat::zeros(0, 0)
    };
    let empty_error = nn1_error(&truncate(train, 0, 0)?, &truncate(test, 0, 0)?)?;
    Ok(SplitOutcome {
        split,
        sweep,
        empty_error,
        r1,
        r2,
    })
}

fn scaled_basis(basis: BilinearBasis, scaling: Scaling) -> BilinearBasis {
    match scaling {
        Scaling::UnitColumn => basis.unit_columns(),
        _ => basis,
    }
}

fn run_split(
    config: &ExperimentConfig,
    split: usize,
    train: &MtsDataset,
    test: &MtsDataset,
    scalings: &[Scaling],
) -> Result<Vec<SplitOutcome>> {
    let (g1, g2) = config.grids()?;
    let split_seed = config.seed.wrapping_add(split as u64);
    let mut outcomes = Vec::with_capacity(scalings.len());
    match config.method {
        Method::Rblda | Method::Rlda => {
            for &scaling in scalings {
                let cv_method = if config.method == Method::Rblda {
                    CvMethod::Rblda
                } else {
                    CvMethod::Rlda
                };
                let cv = CvConfig {
                    method: cv_method,
                    grid1: g1.clone(),
                    grid2: g2.clone(),
                    folds: config.folds,
                    seed: split_seed,
                    scaling,
                    workers: 1,
                };
                let report = cross_validate(train, &cv)?;
                let (r1, r2) = report.selected_values;
                let (tr, te) = match r2 {
                    Some(r2) => {
                        let model = rblda_fit_v2(train, r1, r2, scaling)?;
                        (model.project(train)?, model.project(test)?)
                    }
                    None => {
                        let model = fit_rlda(train, r1, scaling)?;
                        (model.project(train)?, model.project(test)?)
                    }
                };
                outcomes.push(sweep_outcome(split, &tr, &te, Some(r1), r2)?);
            }
        }
        Method::Blda | Method::Pblda => {
            let mode = if config.method == Method::Blda {
                WhiteningMode::Strict
            } else {
                WhiteningMode::Pseudo
            };
            let fitted = blda_fit(train, mode)?;
            for &scaling in scalings {
                let basis = scaled_basis(fitted.clone(), scaling);
                outcomes.push(sweep_outcome(split, &basis.project(train)?, &basis.project(test)?, None, None)?);
            }
        }
        Method::Bpca => {
            let (q1, q2) = total_scatter_ranks(train)?;
            let basis = bpca_fit(train, q1, q2)?;
            for _ in scalings {
                outcomes.push(sweep_outcome(split, &basis.project(train)?, &basis.project(test)?, None, None)?);
            }
        }
    }
    Ok(outcomes)
}

/// Run the protocol on `data`, optionally testing every split on
/// `fixed_test` instead of the held-out part.
pub fn run_experiment(
    data: &MtsDataset,
    fixed_test: Option<&MtsDataset>,
    config: &ExperimentConfig,
) -> Result<ExperimentReport> {
    if config.splits == 0 {
        return Err(Error::input("need at least one split"));
    }
    if let Some(t) = fixed_test {
        if t.dims() != data.dims() || t.n_classes() != data.n_classes() {
            return Err(Error::input("fixed test set does not match the training data shape"));
        }
    }
    config.grids()?;
    let scalings = config.scaling.scalings(config.method);

    let run = |split: usize| -> Result<Vec<SplitOutcome>> {
        let spec = SplitSpec {
            proportion: config.train_proportion,
            seed: config.seed.wrapping_add(split as u64),
        };
        let (train, held_out) = random_split(data, spec)?;
        let test = fixed_test.cloned().unwrap_or(held_out);
        if test.is_empty() {
            return Err(Error::input(format!(
                "split {split} leaves no test observations (training proportion {})",
                config.train_proportion
            )));
        }
        run_split(config, split, &train, &test, &scalings)
    };
    let results: Vec<Result<Vec<SplitOutcome>>> = if config.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::input(format!("cannot start worker pool: {e}")))?;
        pool.install(|| (0..config.splits).into_par_iter().map(run).collect())
    } else {
        (0..config.splits).map(run).collect()
    };

    let mut per_scaling: Vec<Vec<SplitOutcome>> = vec![Vec::new(); scalings.len()];
    for r in results {
        match r {
            Ok(outcomes) => {
                for (slot, o) in per_scaling.iter_mut().zip(outcomes) {
                    slot.push(o);
                }
            }
            Err(e) if e.category() == ErrorCategory::Unavailable => {
                return Ok(ExperimentReport {
                    method: config.method,
                    proportion: config.train_proportion,
                    policy: config.scaling,
                    outcome: MethodOutcome::Unavailable { reason: e.to_string() },
                });
            }
            Err(e) => return Err(e),
        }
    }
    let summaries: Vec<ScalingSummary> = scalings
        .iter()
        .zip(per_scaling)
        .map(|(&s, outcomes)| summarize(s, outcomes))
        .collect();
    let mut best = 0;
    for (i, s) in summaries.iter().enumerate() {
        if s.mean_error < summaries[best].mean_error {
            best = i;
        }
    }
    Ok(ExperimentReport {
        method: config.method,
        proportion: config.train_proportion,
        policy: config.scaling,
        outcome: MethodOutcome::Evaluated { summaries, best },
    })
}

/// Model-selection timing for growing `m x m` grids.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    /// Row-direction replication factor applied to the data first.
    pub replicate: usize,
    /// Values of `m`; the grid is `i / m`, `i = 1..=m`, in both directions.
    pub grid_sizes: Vec<usize>,
    pub train_proportion: Proportion,
    pub folds: usize,
    pub seed: u64,
    /// Timed runs per grid size; the minimum is reported.
    pub repeats: usize,
    pub workers: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            replicate: 1,
            grid_sizes: vec![1, 2, 5, 10, 50, 100],
            train_proportion: Proportion::new(1, 16).expect("valid proportion"),
            folds: 5,
            seed: 0,
            repeats: 5,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub m: usize,
    pub seconds: f64,
    /// `T(m, m) / T(1, 1)`, relative to the first row when `m = 1` is absent.
    pub ratio: f64,
}

impl BenchRow {
    pub fn candidates(&self) -> usize {
        self.m * self.m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub dims: (usize, usize),
    pub n_train: usize,
    /// `a_l = min(d_l, d_{3-l} n)` for the training part.
    pub a: (usize, usize),
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,candidates,d1,d2,n_train,a1,a2,seconds,ratio\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.m,
                r.candidates(),
                self.dims.0,
                self.dims.1,
                self.n_train,
                self.a.0,
                self.a.1,
                r.seconds,
                r.ratio
            );
        }
        out
    }
}

/// Times [`cross_validate`] on the training part of one split for each grid
/// size. Repeats are interleaved across grid sizes so that drift in machine
/// load affects every size alike; the fastest run of each size is kept.
pub fn run_bench(data: &MtsDataset, config: &BenchConfig) -> Result<BenchReport> {
    if config.replicate == 0 {
        return Err(Error::input("replication factor must be at least 1"));
    }
    if config.grid_sizes.is_empty() || config.grid_sizes.contains(&0) {
        return Err(Error::input("grid sizes must be positive"));
    }
    let data = data.replicate_rows(config.replicate);
    let spec = SplitSpec {
        proportion: config.train_proportion,
        seed: config.seed,
    };
    let (train, _) = random_split(&data, spec)?;
    let configs = config
        .grid_sizes
        .iter()
        .map(|&m| {
            let mut cv = CvConfig::new(CvMethod::Rblda, RegGrid::linspace(m)?);
            cv.folds = config.folds;
            cv.seed = config.seed;
            cv.workers = config.workers;
            Ok(cv)
        })
        .collect::<Result<Vec<_>>>()?;
    // Each round starts at a different size so position effects cancel.
    let mut best = vec![f64::INFINITY; configs.len()];
    for round in 0..config.repeats.max(1) {
        for offset in 0..configs.len() {
            let i = (round + offset) % configs.len();
            let start = Instant::now();
            cross_validate(&train, &configs[i])?;
            best[i] = best[i].min(start.elapsed().as_secs_f64());
        }
    }
    let base = config
        .grid_sizes
        .iter()
        .position(|&m| m == 1)
        .map(|i| best[i])
        .unwrap_or(best[0]);
    let rows = config
        .grid_sizes
        .iter()
        .zip(&best)
        .map(|(&m, &seconds)| BenchRow {
            m,
            seconds,
            ratio: seconds / base,
        })
        .collect();
    let (d1, d2) = data.dims();
    let n = train.len();
    Ok(BenchReport {
        dims: (d1, d2),
        n_train: n,
        a: (d1.min(d2 * n), d2.min(d1 * n)),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::synth_separable;

    #[test]
    fn config_from_toml_with_defaults() {
        let c = ExperimentConfig::from_toml("method = \"rblda\"\ntrain_proportion = \"4/5\"\nseed = 3\n").unwrap();
        assert_eq!(c.method, Method::Rblda);
        assert_eq!(c.train_proportion, Proportion::new(4, 5).unwrap());
        assert_eq!(c.splits, 10);
        assert_eq!(c.folds, 5);
        assert_eq!(c.scaling, ScalingPolicy::W);
        assert!(ExperimentConfig::from_toml("method = \"lda\"").is_err());
        assert!(ExperimentConfig::from_toml("method = \"rblda\"\nbogus = 1").is_err());
    }

    #[test]
    fn dims_tie_break_prefers_small_product() {
        let sweep = Mat::from_row_slice(2, 2, &[0.5, 0.2, 0.2, 0.2]);
        let outcome = SplitOutcome {
            split: 0,
            sweep,
            empty_error: 0.5,
            r1: None,
            r2: None,
        };
        let s = summarize(Scaling::WOrthogonal, vec![outcome]);
        assert_eq!(s.dims, (1, 2));
        assert_eq!(s.mean_error, 0.2);
    }

    #[test]
    fn sample_standard_deviation() {
        let (m, s) = mean_std(&[0.1, 0.3]);
        assert!((m - 0.2).abs() < 1e-15);
        assert!((s - 0.02f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bpca_full_rank_matches_raw_space() {
        let data = synth_separable(4, 3, 10, 2, 0.5, 1.0, 2).unwrap();
        let mut config = ExperimentConfig::new(Method::Bpca);
        config.splits = 3;
        let report = run_experiment(&data, None, &config).unwrap();
        let MethodOutcome::Evaluated { summaries, .. } = &report.outcome else {
            panic!("bpca is always available");
        };
        for o in &summaries[0].outcomes {
            let spec = SplitSpec {
                proportion: config.train_proportion,
                seed: o.split as u64,
            };
            let (train, test) = random_split(&data, spec).unwrap();
            let id = |n| Mat::identity(n, n);
            let raw_tr = crate::features::project_bilinear(&id(4), &id(3), None, &train).unwrap();
            let raw_te = crate::features::project_bilinear(&id(4), &id(3), None, &test).unwrap();
            let full = o.sweep[(o.sweep.nrows() - 1, o.sweep.ncols() - 1)];
            assert_eq!(full, nn1_error(&raw_tr, &raw_te).unwrap());
        }
    }

    #[test]
    fn strict_blda_unavailable_on_wide_data() {
        // d1 = 12 > d2 (n_train - c) = 1 * (6 - 2)
        let data = synth_separable(12, 1, 6, 2, 5.0, 1.0, 3).unwrap();
        let mut config = ExperimentConfig::new(Method::Blda);
        config.splits = 2;
        let report = run_experiment(&data, None, &config).unwrap();
        assert!(report.is_unavailable());
        assert!(report.to_csv().ends_with("blda,1/2,,summary,,,,,,,,unavailable\n"));
        config.method = Method::Pblda;
        assert!(!run_experiment(&data, None, &config).unwrap().is_unavailable());
    }

    #[test]
    fn rblda_separable_is_perfect_and_csv_is_stable() {
        let data = synth_separable(6, 4, 10, 3, 10.0, 1.0, 4).unwrap();
        let mut config = ExperimentConfig::new(Method::Rblda);
        config.splits = 3;
        config.folds = 3;
        config.grid = Some(vec![0.1, 0.5]);
        config.scaling = ScalingPolicy::Best;
        let a = run_experiment(&data, None, &config).unwrap();
        let MethodOutcome::Evaluated { summaries, best } = &a.outcome else {
            panic!("rblda is always available");
        };
        assert_eq!(summaries[*best].mean_error, 0.0);
        config.workers = 3;
        let b = run_experiment(&data, None, &config).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert!(a.to_csv().lines().any(|l| l.starts_with("rblda,1/2,best,summary")));
    }

    #[test]
    fn rlda_runs_through() {
        let data = synth_separable(3, 3, 8, 2, 3.0, 1.0, 5).unwrap();
        let mut config = ExperimentConfig::new(Method::Rlda);
        config.splits = 2;
        config.folds = 2;
        let report = run_experiment(&data, None, &config).unwrap();
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 1 + 2 + 1);
        assert!(csv.lines().nth(1).unwrap().starts_with("rlda,1/2,w,split,0,"));
    }

    #[test]
    fn bench_ratio_starts_at_one() {
        let data = synth_separable(8, 3, 16, 2, 1.0, 1.0, 6).unwrap();
        let config = BenchConfig {
            grid_sizes: vec![1, 3],
            train_proportion: Proportion::new(1, 2).unwrap(),
            folds: 2,
            repeats: 1,
            ..BenchConfig::default()
        };
        let report = run_bench(&data, &config).unwrap();
        assert_eq!(report.rows[0].ratio, 1.0);
        assert!(report.rows.iter().all(|r| r.seconds > 0.0));
        assert_eq!(report.to_csv().lines().count(), 3);
    }
}
