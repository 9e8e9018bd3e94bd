//! Regularized bilinear discriminant analysis for matrix-valued observations
//! such as multivariate time series.
//!
//! Each observation `X` is a `d1 x d2` matrix. Features are `Y = V1ᵀ X V2`
//! with the column basis `V1` and the row basis `V2` found by two
//! independent shrinkage-regularized Fisher problems. The crate also holds
//! the vector baseline (RLDA), unregularized bilinear baselines, grid-search
//! model selection, 1NN evaluation and a signed-rank test for comparing
//! methods.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bilinear;
pub mod dataio;
pub mod error;
pub mod experiment;
pub mod features;
pub mod matalg;
pub mod modelsel;
pub mod rblda;
pub mod rlda;
pub mod scatter;
pub mod stats;

pub use bilinear::{blda_fit, bpca_fit, BilinearBasis, BilinearMethod, WhiteningMode};
pub use dataio::{load_mts, random_split, save_mts, synth_separable, Proportion, SplitSpec};
pub use error::{Direction, Error, ErrorCategory, ParseErrorKind, Result};
pub use experiment::{
    run_bench, run_experiment, BenchConfig, BenchReport, ExperimentConfig, ExperimentReport, Method, ScalingPolicy,
};
pub use features::{nn1_error, nn1_error_sweep, truncate, FeatureBlock, Projector};
pub use matalg::{Mat, Vector};
pub use modelsel::{cross_validate, stratified_folds, CvConfig, CvMethod, CvReport, RegGrid};
pub use rblda::{rblda_fit_v1, rblda_fit_v2, rblda_precompute, RbldaModel};
pub use rlda::{fit_rlda, rlda_direct, rlda_fast, RldaBasis, RldaModel, Scaling};
pub use scatter::{bilinear_scatters, MtsDataset};
pub use stats::{two_step, wilcoxon_one_sided, Alternative, TestResult, Verdict};
