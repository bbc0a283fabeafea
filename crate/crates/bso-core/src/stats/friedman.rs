//! Friedman rankings with control-vs-all z-tests and adjusted p-values.

use crate::error::{Error, Result};

use super::{adjust_bonferroni, adjust_hochberg, adjust_holm, average_ranks, normal_sf};

/// One non-control algorithm compared against the control.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// Column index of the compared algorithm.
    pub index: usize,
    pub z: f64,
    pub p_unadjusted: f64,
    pub p_bonferroni: f64,
    pub p_holm: f64,
    pub p_hochberg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FriedmanResult {
    /// Mean per-problem rank of each algorithm (lower is better).
    pub average_ranks: Vec<f64>,
    pub control: usize,
    pub comparisons: Vec<Comparison>,
}

/// `results` is a problems x algorithms matrix of lower-is-better scores.
/// Each row is ranked with average ties; every non-control column is compared
/// against the control via `z = (R_j - R_c) / sqrt(a(a+1) / (6n))`.
pub fn friedman_with_posthoc(results: &[Vec<f64>], control: usize) -> Result<FriedmanResult> {
    let problems = results.len();
    if problems < 2 {
        return Err(Error::InsufficientData(
            "friedman test needs at least 2 problems".into(),
        ));
    }
    let algorithms = results[0].len();
    if algorithms < 2 {
        return Err(Error::InsufficientData(
            "friedman test needs at least 2 algorithms".into(),
        ));
    }
    if results.iter().any(|row| row.len() != algorithms) {
        return Err(Error::Contract("ragged results matrix".into()));
    }
    if control >= algorithms {
        return Err(Error::Config(format!(
            "control index {control} out of range for {algorithms} algorithms"
        )));
    }

    let mut rank_sums = vec![0.0; algorithms];
    for row in results {
        for (sum, rank) in rank_sums.iter_mut().zip(average_ranks(row)) {
            *sum += rank;
        }
    }
    let average: Vec<f64> = rank_sums.iter().map(|s| s / problems as f64).collect();

    let a = algorithms as f64;
    let n = problems as f64;
    let scale = (a * (a + 1.0) / (6.0 * n)).sqrt();
    let indices: Vec<usize> = (0..algorithms).filter(|&j| j != control).collect();
    let zs: Vec<f64> = indices
        .iter()
        .map(|&j| (average[j] - average[control]) / scale)
        .collect();
    let unadjusted: Vec<f64> = zs.iter().map(|z| (2.0 * normal_sf(z.abs())).min(1.0)).collect();

    let bonf = adjust_bonferroni(&unadjusted);
    let holm = adjust_holm(&unadjusted);
    let hochberg = adjust_hochberg(&unadjusted);

    let comparisons = indices
        .into_iter()
        .enumerate()
        .map(|(k, j)| Comparison {
            index: j,
            z: zs[k],
            p_unadjusted: unadjusted[k],
            p_bonferroni: bonf[k],
            p_holm: holm[k],
            p_hochberg: hochberg[k],
        })
        .collect();

    Ok(FriedmanResult { average_ranks: average, control, comparisons })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unanimous_ordering_of_two_algorithms() {
        let results: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64, i as f64 + 1.0]).collect();
        let r = friedman_with_posthoc(&results, 0).unwrap();
        assert_eq!(r.average_ranks, vec![1.0, 2.0]);
    }

    #[test]
    fn full_ties_give_center_ranks_and_unit_p() {
        let results = vec![vec![5.0; 4]; 6];
        let r = friedman_with_posthoc(&results, 0).unwrap();
        for rank in &r.average_ranks {
            assert_abs_diff_eq!(rank, &2.5, epsilon = 1e-12);
        }
        for c in &r.comparisons {
            assert_eq!(c.p_unadjusted, 1.0);
            assert_eq!(c.p_holm, 1.0);
        }
    }

    #[test]
    fn mean_rank_is_centered() {
        let results = vec![
            vec![3.0, 1.0, 2.0],
            vec![2.0, 3.0, 1.0],
            vec![1.0, 2.0, 3.0],
            vec![1.0, 3.0, 2.0],
        ];
        let r = friedman_with_posthoc(&results, 0).unwrap();
        let mean: f64 = r.average_ranks.iter().sum::<f64>() / 3.0;
        assert_abs_diff_eq!(mean, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn control_dominates_synthetic_matrix() {
        // Algorithm 0 always best, 1 always middle, 2 always worst.
        let results: Vec<Vec<f64>> =
            (0..57).map(|i| vec![i as f64, i as f64 + 1.0, i as f64 + 2.0]).collect();
        let r = friedman_with_posthoc(&results, 0).unwrap();
        assert_eq!(r.average_ranks[0], 1.0);
        assert!(r.average_ranks[0] < r.average_ranks[1]);
        assert!(r.average_ranks[1] < r.average_ranks[2]);
        for c in &r.comparisons {
            assert!(c.p_holm >= c.p_unadjusted);
            assert!(c.p_hochberg <= c.p_holm);
        }
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert!(friedman_with_posthoc(&[vec![1.0, 2.0]], 0).is_err());
        assert!(friedman_with_posthoc(&[vec![1.0], vec![2.0]], 0).is_err());
        assert!(friedman_with_posthoc(&[vec![1.0, 2.0], vec![2.0, 1.0]], 5).is_err());
    }
}
