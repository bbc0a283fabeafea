//! Objective-function contract and the evaluation counter.

use crate::error::{Error, Result};
use crate::types::{Bounds, Individual};

/// A pure, deterministic objective to minimize. Implementations must be
/// finite on all in-bounds inputs and safe to call from concurrent runs.
pub trait ObjectiveFunction: Send + Sync {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn bounds(&self) -> &Bounds;
    fn evaluate(&self, x: &[f64]) -> f64;
}

/// Wraps an objective with the run's evaluation counter. Every call to
/// [`Evaluator::evaluate_individual`] costs exactly one evaluation.
pub struct Evaluator<'a> {
    objective: &'a dyn ObjectiveFunction,
    evaluations: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(objective: &'a dyn ObjectiveFunction) -> Self {
        Self { objective, evaluations: 0 }
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn evaluate_individual(&mut self, x: Vec<f64>) -> Result<Individual> {
        let fitness = self.objective.evaluate(&x);
        self.evaluations += 1;
        if !fitness.is_finite() {
            return Err(Error::NonFiniteObjective {
                name: self.objective.name().to_string(),
                value: fitness,
                position: x,
            });
        }
        Ok(Individual { position: x, fitness })
    }
}
