//! Two-sided Wilcoxon signed-rank test with an exact small-sample path.
//!
//! Differences are `b - a` on a lower-is-better metric, so positive
//! differences favor `a` (the control). Zero differences are dropped and tied
//! magnitudes receive average ranks. For at most [`EXACT_LIMIT`] effective
//! pairs the p-value comes from the exact null distribution of the rank sum;
//! beyond that a normal approximation with tie and continuity corrections is
//! used.

use crate::error::{Error, Result};

use super::{average_ranks, normal_sf};

/// Largest `n_effective` handled by the exact distribution.
pub const EXACT_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct WilcoxonResult {
    /// Rank sum of positive differences (control better).
    pub r_plus: f64,
    /// Rank sum of negative differences (opponent better).
    pub r_minus: f64,
    pub p_value: f64,
    /// Pairs remaining after zero-difference removal.
    pub n_effective: usize,
    /// Whether the exact path produced the p-value.
    pub exact: bool,
}

pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(Error::Contract(format!(
            "paired samples must have equal length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let differences: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| y - x)
        .filter(|d| *d != 0.0)
        .collect();
    let n = differences.len();
    if n < 5 {
        return Err(Error::InsufficientData(format!(
            "only {n} nonzero differences; at least 5 required"
        )));
    }

    let magnitudes: Vec<f64> = differences.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&magnitudes);
    let r_plus: f64 = ranks
        .iter()
        .zip(&differences)
        .filter(|(_, d)| **d > 0.0)
        .map(|(r, _)| r)
        .sum();
    let r_minus: f64 = ranks
        .iter()
        .zip(&differences)
        .filter(|(_, d)| **d < 0.0)
        .map(|(r, _)| r)
        .sum();

    let (p_value, exact) = if n <= EXACT_LIMIT {
        (exact_p(&ranks, r_plus, r_minus), true)
    } else {
        (normal_p(&magnitudes, r_plus, n), false)
    };

    Ok(WilcoxonResult { r_plus, r_minus, p_value, n_effective: n, exact })
}

/// Exact two-sided p over all 2^n sign assignments of the observed ranks,
/// counted by dynamic programming over doubled (integer) rank sums.
fn exact_p(ranks: &[f64], r_plus: f64, r_minus: f64) -> f64 {
    let n = ranks.len();
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0u64; total + 1];
    counts[0] = 1;
    for &r in &doubled {
        for s in (r..=total).rev() {
            counts[s] += counts[s - r];
        }
    }
    let hi = (2.0 * r_plus.max(r_minus)).round() as usize;
    let lo = (2.0 * r_plus.min(r_minus)).round() as usize;
    let upper: u64 = counts[hi..].iter().sum();
    let lower: u64 = counts[..=lo].iter().sum();
    let assignments = (1u64 << n) as f64;
    ((upper + lower) as f64 / assignments).min(1.0)
}

/// Normal approximation with tie variance correction and a 0.5 continuity
/// correction toward the mean.
fn normal_p(magnitudes: &[f64], r_plus: f64, n: usize) -> f64 {
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let mut sorted = magnitudes.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite magnitudes"));
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let variance = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    let centered = r_plus - mean;
    let corrected = if centered > 0.0 {
        centered - 0.5
    } else if centered < 0.0 {
        centered + 0.5
    } else {
        0.0
    };
    let z = corrected / variance.sqrt();
    (2.0 * normal_sf(z.abs())).min(1.0)
}
