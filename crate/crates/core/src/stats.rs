//! One-sided Wilcoxon signed-rank test and the two-step comparison built on
//! it.

use std::fmt;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Exact enumeration is used up to this many nonzero differences.
pub const EXACT_LIMIT: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternative {
    /// Differences tend to be negative.
    Less,
    /// Differences tend to be positive.
    Greater,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PMethod {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    /// `W⁺`, the sum of ranks of the positive differences.
    pub statistic: f64,
    pub p_value: f64,
    pub n_effective: usize,
    pub method: PMethod,
}

/// Average ranks (1-based) of `values`, ties sharing their mean rank.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Sizes of the groups of equal values.
fn tie_groups(values: &[f64]) -> Vec<usize> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut groups = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        groups.push(end - start);
        start = end;
    }
    groups
}

/// Null distribution of `2 W⁺` over all `2^n` sign patterns, as
/// probabilities indexed by the doubled statistic.
fn exact_distribution(doubled_ranks: &[usize]) -> Vec<f64> {
    let total: usize = doubled_ranks.iter().sum();
    let mut counts = vec![0.0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in doubled_ranks {
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let patterns = 2f64.powi(doubled_ranks.len() as i32);
    counts.into_iter().map(|c| c / patterns).collect()
}

pub fn wilcoxon_one_sided(deltas: &[f64], alternative: Alternative) -> Result<TestResult> {
    if let Some(d) = deltas.iter().find(|d| !d.is_finite()) {
        return Err(Error::input(format!("non-finite difference {d}")));
    }
    let nonzero: Vec<f64> = deltas.iter().copied().filter(|&d| d != 0.0).collect();
    let n = nonzero.len();
    if n == 0 {
        return Err(Error::degenerate("all differences are zero"));
    }
    let magnitudes: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&magnitudes);
    let w_plus: f64 = nonzero
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();

    if n <= EXACT_LIMIT {
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let dist = exact_distribution(&doubled);
        let observed = (2.0 * w_plus).round() as usize;
        let p: f64 = match alternative {
            Alternative::Less => dist[..=observed].iter().sum(),
            Alternative::Greater => dist[observed..].iter().sum(),
        };
        return Ok(TestResult {
            statistic: w_plus,
            p_value: p.min(1.0),
            n_effective: n,
            method: PMethod::Exact,
        });
    }

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie_term: f64 = tie_groups(&magnitudes)
        .into_iter()
        .map(|t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    let normal = Normal::standard();
    let sd = var.sqrt();
    let p = match alternative {
        Alternative::Less => normal.cdf((w_plus + 0.5 - mean) / sd),
        Alternative::Greater => normal.sf((w_plus - 0.5 - mean) / sd),
    };
    Ok(TestResult {
        statistic: w_plus,
        p_value: p,
        n_effective: n,
        method: PMethod::NormalApprox,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// The first method's differences are significantly negative.
    Lower,
    /// Significantly positive.
    Higher,
    NotSignificant,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Lower => "lower",
            Verdict::Higher => "higher",
            Verdict::NotSignificant => "not significant",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub verdict: Verdict,
    pub less: TestResult,
    /// Only run when the first test does not reject.
    pub greater: Option<TestResult>,
}

/// Test `δ < 0` at level `alpha`; if not rejected, test `δ > 0`; if neither
/// rejects, the difference is not significant.
pub fn two_step(deltas: &[f64], alpha: f64) -> Result<Comparison> {
    let less = wilcoxon_one_sided(deltas, Alternative::Less)?;
    if less.p_value < alpha {
        return Ok(Comparison {
            verdict: Verdict::Lower,
            less,
            greater: None,
        });
    }
    let greater = wilcoxon_one_sided(deltas, Alternative::Greater)?;
    let verdict = if greater.p_value < alpha {
        Verdict::Higher
    } else {
        Verdict::NotSignificant
    };
    Ok(Comparison {
        verdict,
        less,
        greater: Some(greater),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::rng::SplitMix64;

    /// Direct enumeration of all sign patterns.
    fn brute_force(deltas: &[f64], alternative: Alternative) -> f64 {
        let nonzero: Vec<f64> = deltas.iter().copied().filter(|&d| d != 0.0).collect();
        let ranks = average_ranks(&nonzero.iter().map(|d| d.abs()).collect::<Vec<_>>());
        let observed: f64 = nonzero.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
        let n = nonzero.len();
        let mut hits = 0u64;
        for mask in 0u64..(1 << n) {
            let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            let hit = match alternative {
                Alternative::Less => w <= observed + 1e-9,
                Alternative::Greater => w >= observed - 1e-9,
            };
            hits += hit as u64;
        }
        hits as f64 / (1u64 << n) as f64
    }

    #[test]
    fn all_negative_five() {
        let r = wilcoxon_one_sided(&[-1.0, -2.0, -3.0, -4.0, -5.0], Alternative::Less).unwrap();
        assert_eq!(r.p_value, 0.03125);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.method, PMethod::Exact);
    }

    #[test]
    fn two_deltas() {
        let r = wilcoxon_one_sided(&[-2.0, 1.0], Alternative::Less).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert_eq!(r.p_value, 0.5);
    }

    #[test]
    fn symmetric_pair_is_symmetric() {
        let less = wilcoxon_one_sided(&[-0.3, 0.3], Alternative::Less).unwrap();
        let greater = wilcoxon_one_sided(&[-0.3, 0.3], Alternative::Greater).unwrap();
        assert_eq!(less.statistic, 1.5);
        assert_eq!(less.p_value, greater.p_value);
        assert_eq!(less.p_value, 0.75);
    }

    #[test]
    fn zeros_dropped_and_all_zero_rejected() {
        let r = wilcoxon_one_sided(&[0.0, -1.0, 0.0, -2.0], Alternative::Less).unwrap();
        assert_eq!(r.n_effective, 2);
        assert_eq!(r.p_value, 0.25);
        assert!(matches!(wilcoxon_one_sided(&[0.0, 0.0], Alternative::Less), Err(Error::Degenerate(_))));
        assert!(wilcoxon_one_sided(&[f64::NAN], Alternative::Less).is_err());
    }

    #[test]
    fn exact_matches_enumeration() {
        let mut rng = SplitMix64::new(17);
        for n in 1..=12 {
            // Coarse values force ties and zeros.
            let deltas: Vec<f64> = (0..n).map(|_| (rng.next_gaussian() * 3.0).round()).collect();
            if deltas.iter().all(|&d| d == 0.0) {
                continue;
            }
            for alt in [Alternative::Less, Alternative::Greater] {
                let got = wilcoxon_one_sided(&deltas, alt).unwrap().p_value;
                assert!((got - brute_force(&deltas, alt)).abs() < 1e-12, "{deltas:?}");
            }
        }
    }

    #[test]
    fn sides_cover_at_least_everything() {
        let mut rng = SplitMix64::new(18);
        for _ in 0..20 {
            let deltas: Vec<f64> = (0..9).map(|_| rng.next_gaussian()).collect();
            let l = wilcoxon_one_sided(&deltas, Alternative::Less).unwrap().p_value;
            let g = wilcoxon_one_sided(&deltas, Alternative::Greater).unwrap().p_value;
            assert!(l + g >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn exact_and_normal_agree_at_twenty() {
        let mut rng = SplitMix64::new(19);
        for _ in 0..10 {
            let deltas: Vec<f64> = (0..20).map(|_| rng.next_gaussian() - 0.3).collect();
            let exact = wilcoxon_one_sided(&deltas, Alternative::Less).unwrap().p_value;
            // Normal approximation on the same points (no ties).
            let nf = 20.0f64;
            let ranks = average_ranks(&deltas.iter().map(|d| d.abs()).collect::<Vec<_>>());
            let w: f64 = deltas.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
            let mean = nf * (nf + 1.0) / 4.0;
            let sd = (nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0).sqrt();
            let approx = Normal::standard().cdf((w + 0.5 - mean) / sd);
            assert!((exact - approx).abs() < 0.02, "{exact} vs {approx}");
        }
    }

    #[test]
    fn scale_invariance() {
        let deltas = [-0.5, 1.2, -3.0, -0.1, 2.2, -4.0, -0.7];
        let scaled: Vec<f64> = deltas.iter().map(|d| d * 1000.0).collect();
        let a = wilcoxon_one_sided(&deltas, Alternative::Less).unwrap();
        let b = wilcoxon_one_sided(&scaled, Alternative::Less).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn normal_branch_above_limit() {
        let deltas: Vec<f64> = (1..=30).map(|i| -(i as f64)).collect();
        let r = wilcoxon_one_sided(&deltas, Alternative::Less).unwrap();
        assert_eq!(r.method, PMethod::NormalApprox);
        assert!(r.p_value < 1e-5);
    }

    #[test]
    fn two_step_outcomes() {
        let c = two_step(&[-1.0, 1.0, -1.0, 1.0], 0.05).unwrap();
        assert_eq!(c.verdict, Verdict::NotSignificant);
        assert!(c.greater.is_some());
        let c = two_step(&[-1.0, -2.0, -3.0, -4.0, -5.0], 0.05).unwrap();
        assert_eq!(c.verdict, Verdict::Lower);
        assert!(c.greater.is_none());
        let c = two_step(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.05).unwrap();
        assert_eq!(c.verdict, Verdict::Higher);
    }
}
