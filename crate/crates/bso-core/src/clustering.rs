//! Lloyd-iteration k-means over the population, run once per BSO iteration.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Population;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusteringConfig {
    pub cluster_count: usize,
    pub max_iterations: usize,
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        Self { cluster_count: 5, max_iterations: 100 }
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `count` distinct indices from `0..n`, uniformly without replacement.
fn distinct_indices<R: Rng>(n: usize, count: usize, rng: &mut R) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..count {
        let j = i + rng.random_range(0..n - i);
        pool.swap(i, j);
    }
    pool.truncate(count);
    pool
}

/// Partitions the population into `cfg.cluster_count` clusters and records the
/// assignment plus the best-fitness member of each cluster as its center.
///
/// Centroids start at distinct member positions; Lloyd iterations stop when no
/// assignment changes or `max_iterations` is hit. An emptied cluster has its
/// centroid reseeded at a uniformly chosen member.
pub fn kmeans_partition<R: Rng>(
    population: &mut Population,
    cfg: &ClusteringConfig,
    rng: &mut R,
) -> Result<()> {
    let n = population.len();
    let c = cfg.cluster_count;
    if n == 0 {
        return Err(Error::Config("cannot cluster an empty population".into()));
    }
    if c == 0 || c > n {
        return Err(Error::Config(format!(
            "cluster count {c} must satisfy 1 <= C <= N (N = {n})"
        )));
    }

    let mut centroids: Vec<Vec<f64>> = distinct_indices(n, c, rng)
        .into_iter()
        .map(|i| population.members[i].position.clone())
        .collect();

    let mut assignment = vec![0usize; n];
    for _ in 0..cfg.max_iterations {
        // Assignment step; ties go to the lowest cluster index.
        let mut changed = false;
        for (i, member) in population.members.iter().enumerate() {
            let mut best = 0;
            let mut best_dist = squared_distance(&member.position, &centroids[0]);
            for (k, centroid) in centroids.iter().enumerate().skip(1) {
                let d = squared_distance(&member.position, centroid);
                if d < best_dist {
                    best = k;
                    best_dist = d;
                }
            }
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }

        // Update step.
        let dim = population.members[0].position.len();
        let mut sums = vec![vec![0.0; dim]; c];
        let mut counts = vec![0usize; c];
        for (i, member) in population.members.iter().enumerate() {
            let k = assignment[i];
            counts[k] += 1;
            for (s, v) in sums[k].iter_mut().zip(&member.position) {
                *s += v;
            }
        }
        for k in 0..c {
            if counts[k] == 0 {
                let pick = rng.random_range(0..n);
                centroids[k] = population.members[pick].position.clone();
            } else {
                for s in sums[k].iter_mut() {
                    *s /= counts[k] as f64;
                }
                centroids[k] = std::mem::take(&mut sums[k]);
            }
        }
    }

    // Guarantee no empty cluster in the final assignment: move the member
    // nearest to a reseeded centroid is overkill here; instead reassign a
    // uniformly chosen member to any cluster left empty.
    let mut counts = vec![0usize; c];
    for &a in &assignment {
        counts[a] += 1;
    }
    for k in 0..c {
        while counts[k] == 0 {
            let pick = rng.random_range(0..n);
            if counts[assignment[pick]] > 1 {
                counts[assignment[pick]] -= 1;
                assignment[pick] = k;
                counts[k] += 1;
            }
        }
    }

    // Best-fitness member of each cluster becomes its center.
    let mut centers = vec![usize::MAX; c];
    for (i, member) in population.members.iter().enumerate() {
        let k = assignment[i];
        if centers[k] == usize::MAX || member.fitness < population.members[centers[k]].fitness {
            centers[k] = i;
        }
    }

    population.cluster_assignment = assignment;
    population.centers = centers;
    Ok(())
}
