//! Step-length schedule and the multi-scale strategy ladder.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Logistic sigmoid `1 / (1 + e^(-x))`.
pub fn logsig(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// The ordered set of scale parameters `K_j = k + (j-1)*H`, one per strategy.
///
/// Small scales steepen the schedule (wide early steps, aggressive shrink);
/// large scales flatten it toward `0.5 * u`, keeping the search localized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyLadder {
    base: f64,
    increment: f64,
    scales: Vec<f64>,
}

impl StrategyLadder {
    pub fn new(base_k: f64, increment_h: f64, count_m: usize) -> Result<Self> {
        if !(base_k > 0.0) {
            return Err(Error::Config(format!("ladder base k must be positive, got {base_k}")));
        }
        if !(increment_h > 0.0) {
            return Err(Error::Config(format!(
                "ladder increment H must be positive, got {increment_h}"
            )));
        }
        if count_m == 0 {
            return Err(Error::Config("ladder must contain at least one strategy".into()));
        }
        let scales = (0..count_m)
            .map(|j| base_k + j as f64 * increment_h)
            .collect();
        Ok(Self { base: base_k, increment: increment_h, scales })
    }

    /// Degenerate single-scale ladder (the classic BSO setting is `K = 20`).
    pub fn single(scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::Config(format!("scale must be positive, got {scale}")));
        }
        Ok(Self { base: scale, increment: 1.0, scales: vec![scale] })
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }
}

/// Deterministic part of the step-length schedule:
/// `logsig((max_iter/2 - cur_iter) / scale)`.
pub fn step_schedule(max_iter: usize, cur_iter: usize, scale: f64) -> f64 {
    logsig((max_iter as f64 / 2.0 - cur_iter as f64) / scale)
}

/// Full step length `xi = logsig((M_i/2 - C_i)/K) * u` with `u ~ Uniform(0,1)`
/// drawn from the strategy stream. Lies in `(0, 1)`.
pub fn base_step_length<R: Rng>(
    max_iter: usize,
    cur_iter: usize,
    scale: f64,
    rng: &mut R,
) -> f64 {
    step_schedule(max_iter, cur_iter, scale) * rng.random::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ladder_matches_default_constants() {
        let ladder = StrategyLadder::new(10.0, 20.0, 4).unwrap();
        assert_eq!(ladder.scales(), &[10.0, 30.0, 50.0, 70.0]);
    }

    #[test]
    fn single_strategy_ladder() {
        let ladder = StrategyLadder::new(10.0, 20.0, 1).unwrap();
        assert_eq!(ladder.scales(), &[10.0]);
    }

    #[test]
    fn ladder_with_unit_spacing_of_ten() {
        let ladder = StrategyLadder::new(10.0, 10.0, 3).unwrap();
        assert_eq!(ladder.scales(), &[10.0, 20.0, 30.0]);
    }

    #[test]
    fn ladder_rejects_bad_parameters() {
        assert!(StrategyLadder::new(0.0, 20.0, 4).is_err());
        assert!(StrategyLadder::new(10.0, -1.0, 4).is_err());
        assert!(StrategyLadder::new(10.0, 20.0, 0).is_err());
    }

    #[test]
    fn midpoint_iteration_gives_half() {
        // logsig(0) = 1/2, so at C_i = M_i/2 the schedule is exactly 0.5.
        assert_eq!(step_schedule(3000, 1500, 20.0), 0.5);
    }

    #[test]
    fn final_iteration_is_tiny() {
        let v = step_schedule(3000, 3000, 20.0);
        assert_relative_eq!(v, 1.0 / (1.0 + 75f64.exp()), max_relative = 1e-12);
    }

    #[test]
    fn larger_scale_flattens_early_schedule() {
        let wide = step_schedule(3000, 1, 10.0);
        let flat = step_schedule(3000, 1, 70.0);
        assert!(flat < wide);
        assert!(flat > 0.5 && wide > 0.5);
    }

    #[test]
    fn schedule_is_non_increasing_in_iteration() {
        let mut prev = f64::INFINITY;
        for c in 1..=200 {
            let v = step_schedule(200, c, 20.0);
            assert!(v <= prev);
            assert!(v > 0.0 && v < 1.0);
            prev = v;
        }
    }
}
