//! Shared fixtures for the criterion benchmarks.

use rblda_core::{synth_separable, MtsDataset};

/// Two-class synthetic data shaped like a 500 x 28 EEG recording set.
pub fn eeg_shaped(per_class: usize, seed: u64) -> MtsDataset {
    synth_separable(500, 28, per_class, 2, 0.5, 1.0, seed).expect("valid synthetic parameters")
}

/// Small synthetic dataset for solver benchmarks.
pub fn small(d1: usize, d2: usize, per_class: usize, classes: usize, seed: u64) -> MtsDataset {
    synth_separable(d1, d2, per_class, classes, 1.0, 1.0, seed).expect("valid synthetic parameters")
}
