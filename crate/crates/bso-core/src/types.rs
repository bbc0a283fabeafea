//! Search-space and population types shared by every optimizer variant.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Box constraints of a D-dimensional search space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Config(format!(
                "bounds must be non-empty and of equal length (got {} lower, {} upper)",
                lower.len(),
                upper.len()
            )));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u)) {
            return Err(Error::Config(
                "every lower bound must be strictly below its upper bound".into(),
            ));
        }
        Ok(Self { lower, upper })
    }

    /// Symmetric box `[-half, half]^dim`.
    pub fn symmetric(dim: usize, half: f64) -> Result<Self> {
        Self::new(vec![-half; dim], vec![half; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| *v >= *l && *v <= *u)
    }

    /// Uniform point inside the box; consumes `dim` draws.
    pub fn sample_uniform<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| l + (u - l) * rng.random::<f64>())
            .collect()
    }
}

/// Coordinate-wise clamp of `position` into `bounds`. Idempotent; in-bounds
/// inputs pass through unchanged.
pub fn clamp_to_bounds(position: &[f64], bounds: &Bounds) -> Result<Vec<f64>> {
    if position.len() != bounds.dim() {
        return Err(Error::Contract(format!(
            "clamp_to_bounds: position has length {} but bounds expect {}",
            position.len(),
            bounds.dim()
        )));
    }
    Ok(position
        .iter()
        .zip(bounds.lower.iter().zip(&bounds.upper))
        .map(|(v, (l, u))| v.clamp(*l, *u))
        .collect())
}

/// A candidate solution with its cached objective value (minimization).
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub position: Vec<f64>,
    pub fitness: f64,
}

impl Individual {
    /// Strictly-smaller-fitness comparison; ties are not "better".
    pub fn is_better_than(&self, other: &Individual) -> bool {
        self.fitness < other.fitness
    }
}

/// The population together with its current cluster structure.
///
/// `centers[c]` indexes the best-fitness member of cluster `c`; both fields
/// are (re)populated by `clustering::kmeans_partition` each iteration.
#[derive(Debug, Clone)]
pub struct Population {
    pub members: Vec<Individual>,
    pub cluster_assignment: Vec<usize>,
    pub centers: Vec<usize>,
}

impl Population {
    pub fn new(members: Vec<Individual>) -> Self {
        let n = members.len();
        Self {
            members,
            cluster_assignment: vec![0; n],
            centers: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Index of the best (lowest-fitness) member.
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for (i, m) in self.members.iter().enumerate() {
            if m.fitness < self.members[best].fitness {
                best = i;
            }
        }
        best
    }

    /// Member indices belonging to cluster `c`.
    pub fn cluster_members(&self, c: usize) -> Vec<usize> {
        self.cluster_assignment
            .iter()
            .enumerate()
            .filter(|(_, a)| **a == c)
            .map(|(i, _)| i)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamp_pushes_outliers_to_boundary() {
        let b = Bounds::symmetric(2, 1.0).unwrap();
        let out = clamp_to_bounds(&[5.0, -5.0], &b).unwrap();
        assert_eq!(out, vec![1.0, -1.0]);
    }

    #[test]
    fn clamp_is_identity_in_bounds() {
        let b = Bounds::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let out = clamp_to_bounds(&[0.3, 0.7], &b).unwrap();
        assert_eq!(out, vec![0.3, 0.7]);
    }

    #[test]
    fn clamp_boundary_is_fixed_point() {
        let b = Bounds::symmetric(1, 100.0).unwrap();
        let out = clamp_to_bounds(&[-100.0], &b).unwrap();
        assert_eq!(out, vec![-100.0]);
    }

    #[test]
    fn clamp_rejects_length_mismatch() {
        let b = Bounds::symmetric(2, 1.0).unwrap();
        assert!(clamp_to_bounds(&[0.0], &b).is_err());
    }

    #[test]
    fn bounds_reject_inverted_interval() {
        assert!(Bounds::new(vec![1.0], vec![1.0]).is_err());
        assert!(Bounds::new(vec![2.0], vec![1.0]).is_err());
        assert!(Bounds::new(vec![], vec![]).is_err());
    }

    #[test]
    fn best_index_finds_minimum() {
        let pop = Population::new(vec![
            Individual { position: vec![0.0], fitness: 3.0 },
            Individual { position: vec![0.0], fitness: 1.0 },
            Individual { position: vec![0.0], fitness: 2.0 },
        ]);
        assert_eq!(pop.best_index(), 1);
    }
}
