//! Strategy-selection memories and step-size adaptation baselines.
//!
//! Three mechanisms share the roulette selector:
//! - the improvement memory, which stores per-strategy fitness-improvement
//!   magnitudes in a sliding window and converts column sums into selection
//!   probabilities;
//! - the success/failure memory baseline, which stores 0/1 counts and selects
//!   by success rate;
//! - the 1/5 success rule, which adapts a Gaussian mutation deviation from the
//!   epoch success rate instead of selecting among strategies.

use std::collections::VecDeque;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: usize = 50;
pub const DEFAULT_FLOOR: f64 = 0.01;

/// Sliding window of per-strategy fitness improvements. Failures contribute
/// zero; there is no failure side.
#[derive(Debug, Clone)]
pub struct ImprovementMemory {
    window: usize,
    floor: f64,
    strategies: usize,
    rows: VecDeque<Vec<f64>>,
}

impl ImprovementMemory {
    pub fn new(strategies: usize, window: usize) -> Self {
        Self {
            window,
            floor: DEFAULT_FLOOR,
            strategies,
            rows: VecDeque::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Appends one iteration's improvements (one slot per strategy), evicting
    /// the oldest row once the window is full.
    pub fn record(&mut self, improvements: Vec<f64>) -> Result<()> {
        if improvements.len() != self.strategies {
            return Err(Error::Contract(format!(
                "improvement row has length {}, expected {}",
                improvements.len(),
                self.strategies
            )));
        }
        if improvements.iter().any(|d| *d < 0.0 || !d.is_finite()) {
            return Err(Error::Contract(
                "improvements must be non-negative and finite".into(),
            ));
        }
        if self.rows.len() == self.window {
            self.rows.pop_front();
        }
        self.rows.push_back(improvements);
        Ok(())
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.strategies];
        for row in &self.rows {
            for (s, d) in sums.iter_mut().zip(row) {
                *s += d;
            }
        }
        sums
    }

    /// `p_j = (S_j + floor) / sum_m (S_m + floor)` over the window column
    /// sums. Empty memory yields the uniform distribution.
    pub fn probabilities(&self) -> Vec<f64> {
        let mut weights = self.column_sums();
        for w in weights.iter_mut() {
            *w += self.floor;
        }
        let total: f64 = weights.iter().sum();
        weights.iter().map(|w| w / total).collect()
    }
}

/// Paired sliding windows of success and failure counts per strategy.
#[derive(Debug, Clone)]
pub struct SuccessFailureMemory {
    window: usize,
    floor: f64,
    strategies: usize,
    successes: VecDeque<Vec<u32>>,
    failures: VecDeque<Vec<u32>>,
}

impl SuccessFailureMemory {
    pub fn new(strategies: usize, window: usize) -> Self {
        Self {
            window,
            floor: DEFAULT_FLOOR,
            strategies,
            successes: VecDeque::new(),
            failures: VecDeque::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.successes.len()
    }

    /// Appends matched success/failure rows; both FIFOs evict in lockstep.
    pub fn record(&mut self, successes: Vec<u32>, failures: Vec<u32>) -> Result<()> {
        if successes.len() != self.strategies || failures.len() != self.strategies {
            return Err(Error::Contract(format!(
                "outcome rows must have length {}",
                self.strategies
            )));
        }
        if self.successes.len() == self.window {
            self.successes.pop_front();
            self.failures.pop_front();
        }
        self.successes.push_back(successes);
        self.failures.push_back(failures);
        Ok(())
    }

    /// Success rate per strategy over the window, `S_j = a/(a+b) + floor`
    /// (with `0/0` treated as zero), normalized into a distribution.
    pub fn probabilities(&self) -> Vec<f64> {
        let mut alpha = vec![0u64; self.strategies];
        let mut beta = vec![0u64; self.strategies];
        for row in &self.successes {
            for (a, v) in alpha.iter_mut().zip(row) {
                *a += u64::from(*v);
            }
        }
        for row in &self.failures {
            for (b, v) in beta.iter_mut().zip(row) {
                *b += u64::from(*v);
            }
        }
        let scores: Vec<f64> = alpha
            .iter()
            .zip(&beta)
            .map(|(&a, &b)| {
                let rate = if a + b == 0 { 0.0 } else { a as f64 / (a + b) as f64 };
                rate + self.floor
            })
            .collect();
        let total: f64 = scores.iter().sum();
        scores.iter().map(|s| s / total).collect()
    }
}

/// Cumulative-sum inversion of a single uniform draw.
pub fn roulette_select<R: Rng>(probabilities: &[f64], rng: &mut R) -> Result<usize> {
    roulette_select_at(probabilities, rng.random::<f64>())
}

/// Deterministic core of [`roulette_select`], exposed for stubbed-draw tests.
pub fn roulette_select_at(probabilities: &[f64], draw: f64) -> Result<usize> {
    if probabilities.is_empty() {
        return Err(Error::Contract("empty probability vector".into()));
    }
    if probabilities.iter().any(|p| *p < 0.0 || !p.is_finite()) {
        return Err(Error::Contract("probabilities must be non-negative and finite".into()));
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Contract(format!(
            "probabilities must sum to 1 within 1e-12, got {total}"
        )));
    }
    let mut cumulative = 0.0;
    for (j, p) in probabilities.iter().enumerate() {
        cumulative += p;
        if draw < cumulative {
            return Ok(j);
        }
    }
    // Rounding can leave the cumulative sum a hair below 1.
    Ok(probabilities.len() - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OneFifthConfig {
    /// Scale factor `r`, conventionally in `[0.85, 0.99]`.
    pub scale_factor: f64,
    /// Trials per adaptation epoch.
    pub epoch_length: usize,
    /// Initial deviation as a fraction of the mean bound width.
    pub initial_sigma_fraction: f64,
}

impl Default for OneFifthConfig {
    fn default() -> Self {
        Self {
            scale_factor: 0.9,
            epoch_length: DEFAULT_WINDOW,
            initial_sigma_fraction: 0.1,
        }
    }
}

/// State of the 1/5 success rule: Gaussian deviation adapted per epoch from
/// the observed success rate.
#[derive(Debug, Clone)]
pub struct OneFifthState {
    sigma: f64,
    scale_factor: f64,
    epoch_length: usize,
    successes: usize,
    trials: usize,
}

impl OneFifthState {
    pub fn new(initial_sigma: f64, cfg: &OneFifthConfig) -> Result<Self> {
        if !(initial_sigma > 0.0) {
            return Err(Error::Config(format!("sigma must be positive, got {initial_sigma}")));
        }
        if !(cfg.scale_factor > 0.0 && cfg.scale_factor < 1.0) {
            return Err(Error::Config(format!(
                "scale factor must lie in (0, 1), got {}",
                cfg.scale_factor
            )));
        }
        if cfg.epoch_length == 0 {
            return Err(Error::Config("epoch length must be at least 1".into()));
        }
        Ok(Self {
            sigma: initial_sigma,
            scale_factor: cfg.scale_factor,
            epoch_length: cfg.epoch_length,
            successes: 0,
            trials: 0,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn epoch_complete(&self) -> bool {
        self.trials == self.epoch_length
    }

    /// Gaussian perturbation with deviation `sigma` per coordinate.
    pub fn step<R: Rng>(&self, rng: &mut R, dim: usize) -> Vec<f64> {
        let normal = Normal::new(0.0, self.sigma).expect("sigma > 0");
        (0..dim).map(|_| normal.sample(rng)).collect()
    }

    pub fn record_trial(&mut self, success: bool) {
        debug_assert!(self.trials < self.epoch_length);
        self.trials += 1;
        if success {
            self.successes += 1;
        }
    }

    /// Epoch-boundary update: grow `sigma` when the success rate exceeds 0.2,
    /// shrink it below 0.2, leave it untouched at exactly 0.2.
    pub fn update(&mut self) -> Result<()> {
        if self.trials != self.epoch_length {
            return Err(Error::Contract(format!(
                "update requested after {} of {} trials",
                self.trials, self.epoch_length
            )));
        }
        let rate = self.successes as f64 / self.trials as f64;
        if rate > 0.2 {
            self.sigma /= self.scale_factor;
        } else if rate < 0.2 {
            self.sigma *= self.scale_factor;
        }
        self.successes = 0;
        self.trials = 0;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{RngStream, StreamLabel};
    use approx::assert_relative_eq;

    #[test]
    fn ims_appends_and_evicts_fifo() {
        let mut mem = ImprovementMemory::new(4, 50);
        mem.record(vec![2.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(mem.len(), 1);
        assert_eq!(mem.column_sums(), vec![2.0, 0.0, 0.0, 0.0]);

        for i in 0..50 {
            mem.record(vec![0.0, i as f64, 0.0, 0.0]).unwrap();
        }
        assert_eq!(mem.len(), 50);
        // The first row (2 in column 0) is gone after L + 1 records.
        assert_eq!(mem.column_sums()[0], 0.0);
    }

    #[test]
    fn ims_success_improvement_is_fitness_delta() {
        // f(X) = 10 beaten by f(X') = 7 under strategy 2 contributes +3 there.
        let mut mem = ImprovementMemory::new(4, 50);
        let mut row = vec![0.0; 4];
        row[2] += 10.0 - 7.0;
        mem.record(row).unwrap();
        assert_eq!(mem.column_sums(), vec![0.0, 0.0, 3.0, 0.0]);
    }

    #[test]
    fn ims_rejects_negative_improvement() {
        let mut mem = ImprovementMemory::new(2, 10);
        assert!(mem.record(vec![-1.0, 0.0]).is_err());
    }

    #[test]
    fn ims_empty_memory_is_uniform() {
        let mem = ImprovementMemory::new(4, 50);
        assert_eq!(mem.probabilities(), vec![0.25; 4]);
    }

    #[test]
    fn ims_probability_arithmetic() {
        let mut mem = ImprovementMemory::new(4, 50);
        mem.record(vec![2.0, 1.0, 1.0, 0.0]).unwrap();
        let p = mem.probabilities();
        let expected = [2.01 / 4.04, 1.01 / 4.04, 1.01 / 4.04, 0.01 / 4.04];
        for (got, want) in p.iter().zip(expected) {
            assert_relative_eq!(got, &want, max_relative = 1e-12);
        }
    }

    #[test]
    fn sfms_records_matched_rows() {
        let mut mem = SuccessFailureMemory::new(4, 50);
        mem.record(vec![0, 0, 1, 0], vec![0, 0, 0, 0]).unwrap();
        mem.record(vec![0, 0, 0, 0], vec![1, 0, 0, 0]).unwrap();
        assert_eq!(mem.len(), 2);

        for _ in 0..60 {
            mem.record(vec![0; 4], vec![0; 4]).unwrap();
        }
        assert_eq!(mem.len(), 50);
        assert_eq!(mem.successes.len(), mem.failures.len());
    }

    #[test]
    fn sfms_probability_arithmetic() {
        // alpha = (5, 0), beta = (5, 10): S = (0.51, 0.01).
        let mut mem = SuccessFailureMemory::new(2, 50);
        mem.record(vec![5, 0], vec![5, 10]).unwrap();
        let p = mem.probabilities();
        assert_relative_eq!(p[0], 0.51 / 0.52, max_relative = 1e-12);
        assert_relative_eq!(p[1], 0.01 / 0.52, max_relative = 1e-12);
    }

    #[test]
    fn sfms_empty_memory_is_uniform() {
        let mem = SuccessFailureMemory::new(4, 50);
        assert_eq!(mem.probabilities(), vec![0.25; 4]);
    }

    #[test]
    fn sfms_symmetric_successes_are_even() {
        let mut mem = SuccessFailureMemory::new(2, 50);
        mem.record(vec![10, 10], vec![0, 0]).unwrap();
        assert_eq!(mem.probabilities(), vec![0.5, 0.5]);
    }

    #[test]
    fn roulette_degenerate_distribution() {
        let mut rng = RngStream::new(1, StreamLabel::Strategy);
        for _ in 0..20 {
            assert_eq!(roulette_select(&[1.0, 0.0, 0.0, 0.0], &mut rng).unwrap(), 0);
        }
    }

    #[test]
    fn roulette_cumulative_boundary() {
        assert_eq!(roulette_select_at(&[0.5, 0.5], 0.4999).unwrap(), 0);
        assert_eq!(roulette_select_at(&[0.5, 0.5], 0.5001).unwrap(), 1);
    }

    #[test]
    fn roulette_rejects_bad_distribution() {
        assert!(roulette_select_at(&[0.5, 0.4], 0.1).is_err());
        assert!(roulette_select_at(&[1.5, -0.5], 0.1).is_err());
        assert!(roulette_select_at(&[], 0.1).is_err());
    }

    #[test]
    fn roulette_frequencies_match_uniform_distribution() {
        let mut rng = RngStream::new(77, StreamLabel::Strategy);
        let p = [0.25; 4];
        let draws = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..draws {
            counts[roulette_select(&p, &mut rng).unwrap()] += 1;
        }
        // 3 sigma of Binomial(100k, 0.25).
        let sigma = (draws as f64 * 0.25 * 0.75).sqrt();
        for c in counts {
            assert!((c as f64 - draws as f64 * 0.25).abs() < 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn one_fifth_update_branches() {
        let cfg = OneFifthConfig { scale_factor: 0.9, epoch_length: 10, ..Default::default() };

        let mut s = OneFifthState::new(1.0, &cfg).unwrap();
        for i in 0..10 {
            s.record_trial(i < 5); // rate 0.5
        }
        s.update().unwrap();
        assert_relative_eq!(s.sigma(), 1.0 / 0.9, max_relative = 1e-12);

        let mut s = OneFifthState::new(1.0, &cfg).unwrap();
        for i in 0..10 {
            s.record_trial(i < 1); // rate 0.1
        }
        s.update().unwrap();
        assert_relative_eq!(s.sigma(), 0.9, max_relative = 1e-12);

        let mut s = OneFifthState::new(1.0, &cfg).unwrap();
        for i in 0..10 {
            s.record_trial(i < 2); // rate 0.2 exactly
        }
        s.update().unwrap();
        assert_eq!(s.sigma(), 1.0);
    }

    #[test]
    fn one_fifth_update_mid_epoch_is_rejected() {
        let cfg = OneFifthConfig { epoch_length: 10, ..Default::default() };
        let mut s = OneFifthState::new(1.0, &cfg).unwrap();
        s.record_trial(true);
        assert!(s.update().is_err());
    }

    #[test]
    fn one_fifth_sigma_stays_positive() {
        let cfg = OneFifthConfig { scale_factor: 0.85, epoch_length: 5, ..Default::default() };
        let mut s = OneFifthState::new(1.0, &cfg).unwrap();
        for _ in 0..200 {
            for _ in 0..5 {
                s.record_trial(false);
            }
            s.update().unwrap();
            assert!(s.sigma() > 0.0);
        }
    }

    #[test]
    fn one_fifth_step_sample_std_close_to_sigma() {
        let cfg = OneFifthConfig::default();
        let s = OneFifthState::new(1.0, &cfg).unwrap();
        let mut rng = RngStream::new(5, StreamLabel::Mutation);
        let samples = s.step(&mut rng, 100_000);
        let mean: f64 = samples.iter().sum::<f64>() / samples.len() as f64;
        let var: f64 =
            samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / samples.len() as f64;
        assert!((var.sqrt() - 1.0).abs() < 0.01, "sample std {}", var.sqrt());
    }

    #[test]
    fn one_fifth_distinct_seeds_give_distinct_steps() {
        let cfg = OneFifthConfig::default();
        let s = OneFifthState::new(0.5, &cfg).unwrap();
        let mut a = RngStream::new(1, StreamLabel::Mutation);
        let mut b = RngStream::new(2, StreamLabel::Mutation);
        assert_ne!(s.step(&mut a, 8), s.step(&mut b, 8));
    }
}
