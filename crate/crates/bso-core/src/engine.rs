//! Classic BSO and the adaptive-step-length variants, sharing one loop.
//!
//! A single iteration re-clusters the population, optionally replaces one
//! cluster center with a fresh random individual, then generates one candidate
//! per member. The base point of each candidate comes from the probabilistic
//! selection tree (one or two clusters, centers or general members); the
//! perturbation is `xi * N(0,1)` with the step length drawn from a strategy
//! on the ladder, or a plain Gaussian step under the 1/5-rule variant.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::clustering::{kmeans_partition, ClusteringConfig};
use crate::error::{Error, Result};
use crate::memory::{
    roulette_select, ImprovementMemory, OneFifthConfig, OneFifthState, SuccessFailureMemory,
};
use crate::objective::{Evaluator, ObjectiveFunction};
use crate::rng::RunRngs;
use crate::step::{step_schedule, StrategyLadder};
use crate::types::{clamp_to_bounds, Individual, Population};

/// The fixed scale used by classic BSO.
pub const CLASSIC_SCALE: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    ClassicBso,
    AsbsoIms,
    AsbsoSfms,
    BsoOneFifth,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classic_bso" | "bso" => Ok(Self::ClassicBso),
            "asbso_ims" | "asbso" => Ok(Self::AsbsoIms),
            "asbso_sfms" => Ok(Self::AsbsoSfms),
            "bso_one_fifth" => Ok(Self::BsoOneFifth),
            other => Err(Error::Config(format!("unknown variant `{other}`"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::ClassicBso => "classic_bso",
            Self::AsbsoIms => "asbso_ims",
            Self::AsbsoSfms => "asbso_sfms",
            Self::BsoOneFifth => "bso_one_fifth",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BsoConfig {
    pub population_size: usize,
    pub clustering: ClusteringConfig,
    /// Probability of replacing one cluster center by a random individual.
    pub p_replace: f64,
    /// Probability of generating from one cluster (vs two).
    pub p_one_cluster: f64,
    /// Within one cluster: probability of using the center.
    pub p_center_one: f64,
    /// Across two clusters: probability of combining the centers.
    pub p_center_two: f64,
    /// Maximum number of objective evaluations.
    pub budget: u64,
    pub variant: Variant,
    pub ladder: StrategyLadder,
    /// Sliding-window length of the selection memories.
    pub memory_length: usize,
    pub one_fifth: OneFifthConfig,
}

impl BsoConfig {
    pub fn new(variant: Variant, population_size: usize, budget: u64) -> Self {
        Self {
            population_size,
            clustering: ClusteringConfig::default(),
            p_replace: 0.2,
            p_one_cluster: 0.8,
            p_center_one: 0.4,
            p_center_two: 0.5,
            budget,
            variant,
            ladder: StrategyLadder::new(10.0, 20.0, 4).expect("default ladder"),
            memory_length: crate::memory::DEFAULT_WINDOW,
            one_fifth: OneFifthConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("p_replace", self.p_replace),
            ("p_one_cluster", self.p_one_cluster),
            ("p_center_one", self.p_center_one),
            ("p_center_two", self.p_center_two),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} is outside [0, 1]")));
            }
        }
        if self.population_size == 0 {
            return Err(Error::Config("population size must be at least 1".into()));
        }
        if self.budget < self.population_size as u64 {
            return Err(Error::Config(format!(
                "budget {} cannot cover the initial population of {}",
                self.budget, self.population_size
            )));
        }
        if self.clustering.cluster_count > self.population_size {
            return Err(Error::Config(format!(
                "cluster count {} exceeds population size {}",
                self.clustering.cluster_count, self.population_size
            )));
        }
        if self.memory_length == 0 {
            return Err(Error::Config("memory length must be at least 1".into()));
        }
        Ok(())
    }
}

/// Best-so-far fitness sampled once after initialization and once per
/// iteration, keyed by evaluations used.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTrace {
    pub samples: Vec<(u64, f64)>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub best: Individual,
    pub evaluations_used: u64,
    pub trace: ConvergenceTrace,
    /// Times the two-cluster branch fell back to one cluster (C < 2).
    pub fallback_count: u64,
}

/// Selection tree of the generation phase: returns the base point for one
/// candidate plus the member slot the candidate competes with (the selected
/// X itself; for two-individual combinations, the first contributor's slot).
fn select_base_point<R: Rng>(
    population: &Population,
    cfg: &BsoConfig,
    rng: &mut R,
    fallbacks: &mut u64,
) -> (Vec<f64>, usize) {
    let clusters = population.centers.len();
    let one_cluster = rng.random::<f64>() < cfg.p_one_cluster;
    if one_cluster || clusters < 2 {
        if !one_cluster {
            *fallbacks += 1;
        }
        let c = rng.random_range(0..clusters);
        let pick = if rng.random::<f64>() < cfg.p_center_one {
            population.centers[c]
        } else {
            let members = population.cluster_members(c);
            members[rng.random_range(0..members.len())]
        };
        (population.members[pick].position.clone(), pick)
    } else {
        let a = rng.random_range(0..clusters);
        let mut b = rng.random_range(0..clusters - 1);
        if b >= a {
            b += 1;
        }
        let (ia, ib) = if rng.random::<f64>() < cfg.p_center_two {
            (population.centers[a], population.centers[b])
        } else {
            let ma = population.cluster_members(a);
            let mb = population.cluster_members(b);
            (
                ma[rng.random_range(0..ma.len())],
                mb[rng.random_range(0..mb.len())],
            )
        };
        let w: f64 = rng.random();
        (
            combine(&population.members[ia].position, &population.members[ib].position, w),
            ia,
        )
    }
}

/// Uniformly weighted convex combination `w*a + (1-w)*b`.
pub fn combine(a: &[f64], b: &[f64], w: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| w * x + (1.0 - w) * y).collect()
}

/// `X_new = X + xi * N(0,1)` per dimension, clamped into bounds.
pub fn generate_candidate<R: Rng>(
    base: &[f64],
    xi: f64,
    bounds: &crate::types::Bounds,
    rng: &mut R,
) -> Vec<f64> {
    let perturbed: Vec<f64> = base
        .iter()
        .map(|x| x + xi * rng.sample::<f64, _>(StandardNormal))
        .collect();
    clamp_to_bounds(&perturbed, bounds).expect("base point has the bounds' dimension")
}

enum Memory {
    None,
    Improvement(ImprovementMemory),
    SuccessFailure(SuccessFailureMemory),
    OneFifth(OneFifthState),
}

/// Executes one full optimizer run. Deterministic given `(config, seed)`.
pub fn run(f: &dyn ObjectiveFunction, cfg: &BsoConfig, seed: u64) -> Result<RunOutcome> {
    cfg.validate()?;
    let bounds = f.bounds();
    let n = cfg.population_size;
    let mut rngs = RunRngs::new(seed);
    let mut evaluator = Evaluator::new(f);

    let mut members = Vec::with_capacity(n);
    for _ in 0..n {
        let x = bounds.sample_uniform(&mut rngs.init);
        members.push(evaluator.evaluate_individual(x)?);
    }
    let mut population = Population::new(members);
    let mut best = population.members[population.best_index()].clone();
    let mut trace = ConvergenceTrace { samples: vec![(evaluator.evaluations(), best.fitness)] };
    let mut fallback_count = 0u64;

    // The step schedule is phrased in iterations; the stopping rule is in
    // evaluations, so derive the iteration horizon from the budget.
    let max_iter = ((cfg.budget - n as u64) / n as u64 + 1) as usize;

    let ladder = match cfg.variant {
        Variant::ClassicBso | Variant::BsoOneFifth => StrategyLadder::single(CLASSIC_SCALE)?,
        Variant::AsbsoIms | Variant::AsbsoSfms => cfg.ladder.clone(),
    };
    let strategies = ladder.len();

    let mut memory = match cfg.variant {
        Variant::ClassicBso => Memory::None,
        Variant::AsbsoIms => {
            Memory::Improvement(ImprovementMemory::new(strategies, cfg.memory_length))
        }
        Variant::AsbsoSfms => {
            Memory::SuccessFailure(SuccessFailureMemory::new(strategies, cfg.memory_length))
        }
        Variant::BsoOneFifth => {
            let width: f64 = bounds
                .lower()
                .iter()
                .zip(bounds.upper())
                .map(|(l, u)| u - l)
                .sum::<f64>()
                / bounds.dim() as f64;
            Memory::OneFifth(OneFifthState::new(
                cfg.one_fifth.initial_sigma_fraction * width,
                &cfg.one_fifth,
            )?)
        }
    };

    let mut iteration = 0usize;
    'outer: while evaluator.evaluations() < cfg.budget {
        iteration += 1;
        kmeans_partition(&mut population, &cfg.clustering, &mut rngs.clustering)?;

        if rngs.replacement.random::<f64>() < cfg.p_replace {
            if evaluator.evaluations() >= cfg.budget {
                break;
            }
            let c = rngs.replacement.random_range(0..population.centers.len());
            let x = bounds.sample_uniform(&mut rngs.replacement);
            let fresh = evaluator.evaluate_individual(x)?;
            if fresh.fitness < best.fitness {
                best = fresh.clone();
            }
            population.members[population.centers[c]] = fresh;
        }

        let distribution = match &memory {
            Memory::Improvement(m) => m.probabilities(),
            Memory::SuccessFailure(m) => m.probabilities(),
            Memory::None | Memory::OneFifth(_) => vec![1.0],
        };

        let mut improvements = vec![0.0; strategies];
        let mut successes = vec![0u32; strategies];
        let mut failures = vec![0u32; strategies];

        for _ in 0..n {
            if evaluator.evaluations() >= cfg.budget {
                record_iteration(&mut memory, improvements, successes, failures)?;
                break 'outer;
            }
            let (base, slot) =
                select_base_point(&population, cfg, &mut rngs.selection, &mut fallback_count);

            let (candidate, strategy) = match &memory {
                Memory::OneFifth(state) => {
                    let step = state.step(&mut rngs.mutation, bounds.dim());
                    let moved: Vec<f64> =
                        base.iter().zip(&step).map(|(x, s)| x + s).collect();
                    (clamp_to_bounds(&moved, bounds)?, 0)
                }
                _ => {
                    let j = if strategies == 1 {
                        0
                    } else {
                        roulette_select(&distribution, &mut rngs.strategy)?
                    };
                    let xi = step_schedule(max_iter, iteration, ladder.scales()[j])
                        * rngs.strategy.random::<f64>();
                    (generate_candidate(&base, xi, bounds, &mut rngs.mutation), j)
                }
            };

            let candidate = evaluator.evaluate_individual(candidate)?;
            let incumbent = &population.members[slot];
            if candidate.fitness < incumbent.fitness {
                improvements[strategy] += incumbent.fitness - candidate.fitness;
                successes[strategy] += 1;
                if let Memory::OneFifth(state) = &mut memory {
                    state.record_trial(true);
                }
                if candidate.fitness < best.fitness {
                    best = candidate.clone();
                }
                population.members[slot] = candidate;
            } else {
                failures[strategy] += 1;
                if let Memory::OneFifth(state) = &mut memory {
                    state.record_trial(false);
                }
            }
            if let Memory::OneFifth(state) = &mut memory {
                if state.epoch_complete() {
                    state.update()?;
                }
            }
        }

        let done = evaluator.evaluations() >= cfg.budget;
        record_iteration(&mut memory, improvements, successes, failures)?;
        trace.samples.push((evaluator.evaluations(), best.fitness));
        if done {
            break;
        }
    }

    if trace.samples.last().map(|s| s.0) != Some(evaluator.evaluations()) {
        trace.samples.push((evaluator.evaluations(), best.fitness));
    }

    Ok(RunOutcome {
        best,
        evaluations_used: evaluator.evaluations(),
        trace,
        fallback_count,
    })
}

fn record_iteration(
    memory: &mut Memory,
    improvements: Vec<f64>,
    successes: Vec<u32>,
    failures: Vec<u32>,
) -> Result<()> {
    match memory {
        Memory::Improvement(m) => m.record(improvements),
        Memory::SuccessFailure(m) => m.record(successes, failures),
        Memory::None | Memory::OneFifth(_) => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Bounds;

    pub(crate) struct Sphere {
        pub bounds: Bounds,
    }

    impl ObjectiveFunction for Sphere {
        fn name(&self) -> &str {
            "sphere"
        }
        fn dim(&self) -> usize {
            self.bounds.dim()
        }
        fn bounds(&self) -> &Bounds {
            &self.bounds
        }
        fn evaluate(&self, x: &[f64]) -> f64 {
            x.iter().map(|v| v * v).sum()
        }
    }

    #[test]
    fn combine_midpoint() {
        assert_eq!(combine(&[0.0, 0.0], &[2.0, 2.0], 0.5), vec![1.0, 1.0]);
    }

    #[test]
    fn generate_candidate_zero_step_is_identity() {
        let b = Bounds::symmetric(3, 100.0).unwrap();
        let mut rng = crate::rng::RngStream::new(1, crate::rng::StreamLabel::Mutation);
        let out = generate_candidate(&[1.0, 2.0, 3.0], 0.0, &b, &mut rng);
        assert_eq!(out, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn generate_candidate_clamps_at_boundary() {
        let b = Bounds::symmetric(2, 1.0).unwrap();
        let mut rng = crate::rng::RngStream::new(1, crate::rng::StreamLabel::Mutation);
        for _ in 0..50 {
            let out = generate_candidate(&[1.0, 1.0], 0.9, &b, &mut rng);
            assert!(b.contains(&out));
        }
    }

    #[test]
    fn budget_exactly_covers_initialization() {
        let f = Sphere { bounds: Bounds::symmetric(2, 100.0).unwrap() };
        let cfg = BsoConfig::new(Variant::AsbsoIms, 10, 10);
        let out = run(&f, &cfg, 42).unwrap();
        assert_eq!(out.evaluations_used, 10);
        assert_eq!(out.trace.samples.len(), 1);
    }

    #[test]
    fn budget_below_population_is_rejected() {
        let f = Sphere { bounds: Bounds::symmetric(2, 100.0).unwrap() };
        let cfg = BsoConfig::new(Variant::AsbsoIms, 10, 9);
        assert!(run(&f, &cfg, 42).is_err());
    }

    #[test]
    fn evaluation_count_stays_within_budget() {
        let f = Sphere { bounds: Bounds::symmetric(3, 100.0).unwrap() };
        for budget in [30, 95, 100, 137] {
            let cfg = BsoConfig::new(Variant::AsbsoIms, 20, budget);
            let out = run(&f, &cfg, 7).unwrap();
            assert!(out.evaluations_used <= budget);
            assert!(out.evaluations_used > budget.saturating_sub(20));
        }
    }

    #[test]
    fn trace_is_non_increasing() {
        let f = Sphere { bounds: Bounds::symmetric(5, 100.0).unwrap() };
        for variant in [
            Variant::ClassicBso,
            Variant::AsbsoIms,
            Variant::AsbsoSfms,
            Variant::BsoOneFifth,
        ] {
            let cfg = BsoConfig::new(variant, 20, 2000);
            let out = run(&f, &cfg, 3).unwrap();
            let mut prev = f64::INFINITY;
            for &(_, fit) in &out.trace.samples {
                assert!(fit <= prev, "{variant} trace increased");
                prev = fit;
            }
            assert_eq!(out.best.fitness, prev);
        }
    }

    #[test]
    fn identical_seeds_reproduce_bit_identical_traces() {
        let f = Sphere { bounds: Bounds::symmetric(4, 100.0).unwrap() };
        let cfg = BsoConfig::new(Variant::AsbsoIms, 25, 3000);
        let a = run(&f, &cfg, 99).unwrap();
        let b = run(&f, &cfg, 99).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.best.position, b.best.position);
    }

    #[test]
    fn single_cluster_always_uses_one_cluster_branch() {
        let f = Sphere { bounds: Bounds::symmetric(2, 100.0).unwrap() };
        let mut cfg = BsoConfig::new(Variant::ClassicBso, 10, 500);
        cfg.clustering.cluster_count = 1;
        let out = run(&f, &cfg, 5).unwrap();
        // The forced fallback only counts draws that asked for two clusters.
        assert!(out.fallback_count > 0);
    }

    #[test]
    fn selection_tree_branches_with_stubbed_draws() {
        // Build a clustered 4-member population by hand: cluster 0 holds
        // members 0 and 1 (center 1), cluster 1 holds members 2 and 3
        // (center 2).
        let mut pop = Population::new(vec![
            Individual { position: vec![0.0, 0.0], fitness: 4.0 },
            Individual { position: vec![0.0, 1.0], fitness: 1.0 },
            Individual { position: vec![10.0, 10.0], fitness: 2.0 },
            Individual { position: vec![10.0, 11.0], fitness: 3.0 },
        ]);
        pop.cluster_assignment = vec![0, 0, 1, 1];
        pop.centers = vec![1, 2];
        let cfg = BsoConfig::new(Variant::ClassicBso, 4, 100);

        // One-cluster branch, center taken: draws (p_g) 0.1, cluster 0,
        // (p_c1) 0.1.
        let mut rng = StubRng::new(vec![
            StubDraw::F(0.1),
            StubDraw::Range(0),
            StubDraw::F(0.1),
        ]);
        let mut fb = 0;
        let (base, slot) = select_base_point(&pop, &cfg, &mut rng, &mut fb);
        assert_eq!(base, vec![0.0, 1.0]);
        assert_eq!(slot, 1);

        // Two-cluster branch, centers combined with w = 0.5.
        let mut rng = StubRng::new(vec![
            StubDraw::F(0.9),  // p_g miss: two clusters
            StubDraw::Range(0),
            StubDraw::Range(0), // second cluster index 1 after shift
            StubDraw::F(0.1),  // p_c2 hit: centers
            StubDraw::F(0.5),  // w
        ]);
        let (base, slot) = select_base_point(&pop, &cfg, &mut rng, &mut fb);
        assert_eq!(base, vec![5.0, 5.5]);
        assert_eq!(slot, 1);
        assert_eq!(fb, 0);
    }

    /// Scripted RNG for reaching specific branches of the selection tree.
    enum StubDraw {
        /// Next `random::<f64>()` returns this value.
        F(f64),
        /// Next `random_range` returns this index (low end offset).
        Range(u64),
    }

    struct StubRng {
        draws: std::collections::VecDeque<StubDraw>,
    }

    impl StubRng {
        fn new(draws: Vec<StubDraw>) -> Self {
            Self { draws: draws.into() }
        }
    }

    impl rand::RngCore for StubRng {
        fn next_u32(&mut self) -> u32 {
            self.next_u64() as u32
        }

        fn next_u64(&mut self) -> u64 {
            match self.draws.pop_front().expect("stub exhausted") {
                // random::<f64>() uses the top 53 bits: u = (x >> 11) * 2^-53.
                StubDraw::F(u) => ((u * (1u64 << 53) as f64) as u64) << 11,
                // Small ranges resolve via widening multiply of next_u32, so
                // return a u32 whose product with the range floors to `i`.
                // Using 0 for index 0 is exact; nonzero indices are not needed
                // beyond what F covers, so map i -> i * 2^32 / range upper
                // bound conservatively (only used with i = 0 here).
                StubDraw::Range(i) => i,
            }
        }

        fn fill_bytes(&mut self, dest: &mut [u8]) {
            for b in dest.iter_mut() {
                *b = 0;
            }
        }
    }
}
