//! Nonparametric comparison toolkit: Wilcoxon signed-rank, Friedman test and
//! multiplicity-adjusted post-hoc p-values.

pub mod friedman;
pub mod wilcoxon;

pub use friedman::{friedman_with_posthoc, Comparison, FriedmanResult};
pub use wilcoxon::{wilcoxon_signed_rank, WilcoxonResult};

/// Complementary error function (Chebyshev-fitted rational approximation,
/// fractional error below 1.2e-7 everywhere).
pub(crate) fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let ans = t
        * (-z * z - 1.26551223
            + t * (1.00002368
                + t * (0.37409196
                    + t * (0.09678418
                        + t * (-0.18628806
                            + t * (0.27886807
                                + t * (-1.13520398
                                    + t * (1.48851587
                                        + t * (-0.82215223 + t * 0.17087277)))))))))
        .exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

/// Upper tail of the standard normal, `P(Z > z)`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Average ranks (1-based) of `values`, ties sharing the mean of their span.
pub(crate) fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Bonferroni adjustment: `p * m`, clipped at 1.
pub fn adjust_bonferroni(p: &[f64]) -> Vec<f64> {
    let m = p.len() as f64;
    p.iter().map(|v| (v * m).min(1.0)).collect()
}

/// Holm step-down adjustment.
pub fn adjust_holm(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].partial_cmp(&p[b]).expect("finite p"));
    let mut adjusted = vec![0.0; m];
    let mut running = 0.0f64;
    for (k, &idx) in order.iter().enumerate() {
        let scaled = ((m - k) as f64 * p[idx]).min(1.0);
        running = running.max(scaled);
        adjusted[idx] = running;
    }
    adjusted
}

/// Hochberg step-up adjustment.
pub fn adjust_hochberg(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].partial_cmp(&p[b]).expect("finite p"));
    let mut adjusted = vec![0.0; m];
    let mut running = 1.0f64;
    for (k, &idx) in order.iter().enumerate().rev() {
        let scaled = ((m - k) as f64 * p[idx]).min(1.0);
        running = running.min(scaled);
        adjusted[idx] = running;
    }
    adjusted
}
