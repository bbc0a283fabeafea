//! Experiment manifest: a single JSON document describing the
//! algorithm x function x dimension x seed grid.

use std::path::Path;

use serde::{Deserialize, Serialize};

use bso_core::benchmarks::{
    default_bias, default_transform_seed, BaseFunction, BenchmarkSpec, DEFAULT_CATALOG_SEED,
};
use bso_core::engine::{BsoConfig, Variant};
use bso_core::memory::OneFifthConfig;
use bso_core::step::StrategyLadder;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub algorithms: Vec<AlgorithmSpec>,
    pub functions: Vec<FunctionRef>,
    pub dimensions: Vec<usize>,
    /// Explicit seed list; omitted means `seed_count` seeds from `seed_base`.
    #[serde(default)]
    pub seeds: Option<Vec<u64>>,
    #[serde(default = "default_seed_count")]
    pub seed_count: usize,
    #[serde(default = "default_seed_base")]
    pub seed_base: u64,
    /// Evaluations per run are `budget_multiplier * D`.
    #[serde(default = "default_budget_multiplier")]
    pub budget_multiplier: u64,
    #[serde(default = "default_catalog_seed")]
    pub catalog_seed: u64,
    #[serde(default)]
    pub output_dir: Option<String>,
}

fn default_seed_count() -> usize {
    30
}

fn default_seed_base() -> u64 {
    1
}

fn default_budget_multiplier() -> u64 {
    10_000
}

fn default_catalog_seed() -> u64 {
    DEFAULT_CATALOG_SEED
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    Identity,
    ShiftedRotated,
}

impl Default for TransformKind {
    fn default() -> Self {
        Self::Identity
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionRef {
    pub function: String,
    #[serde(default)]
    pub transform: TransformKind,
    /// Defaults to the catalog's seed rule for `(function, dim)`.
    #[serde(default)]
    pub transform_seed: Option<u64>,
    #[serde(default)]
    pub bias: Option<f64>,
}

impl FunctionRef {
    pub fn resolve(&self, dim: usize, catalog_seed: u64) -> Result<BenchmarkSpec> {
        let function = BaseFunction::from_name(&self.function)
            .map_err(|e| CliError::Validation(format!("functions: {e}")))?;
        Ok(match self.transform {
            TransformKind::Identity => BenchmarkSpec::identity(function, dim),
            TransformKind::ShiftedRotated => BenchmarkSpec::shifted_rotated(
                function,
                dim,
                self.transform_seed
                    .unwrap_or_else(|| default_transform_seed(catalog_seed, function, dim)),
                self.bias.unwrap_or_else(|| default_bias(function)),
            ),
        })
    }
}

/// One algorithm column of the grid: a variant plus config overrides.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub name: String,
    pub variant: Variant,
    #[serde(default = "default_population")]
    pub population: usize,
    #[serde(default = "default_clusters")]
    pub clusters: usize,
    #[serde(default = "default_ladder_k")]
    pub ladder_k: f64,
    #[serde(default = "default_ladder_h")]
    pub ladder_h: f64,
    #[serde(default = "default_ladder_m")]
    pub ladder_m: usize,
    #[serde(default = "default_memory_length")]
    pub memory_length: usize,
    #[serde(default)]
    pub p_replace: Option<f64>,
    #[serde(default)]
    pub p_one_cluster: Option<f64>,
    #[serde(default)]
    pub p_center_one: Option<f64>,
    #[serde(default)]
    pub p_center_two: Option<f64>,
    #[serde(default)]
    pub one_fifth: Option<OneFifthConfig>,
}

fn default_population() -> usize {
    100
}

/// Population and cluster count used by the default desk grid; see
/// [`ExperimentManifest::desk_default`].
pub const DESK_POPULATION: usize = 20;
pub const DESK_CLUSTERS: usize = 2;

fn default_clusters() -> usize {
    5
}

fn default_ladder_k() -> f64 {
    10.0
}

fn default_ladder_h() -> f64 {
    20.0
}

fn default_ladder_m() -> usize {
    4
}

fn default_memory_length() -> usize {
    50
}

impl AlgorithmSpec {
    pub fn new(name: &str, variant: Variant) -> Self {
        Self {
            name: name.to_string(),
            variant,
            population: default_population(),
            clusters: default_clusters(),
            ladder_k: default_ladder_k(),
            ladder_h: default_ladder_h(),
            ladder_m: default_ladder_m(),
            memory_length: default_memory_length(),
            p_replace: None,
            p_one_cluster: None,
            p_center_one: None,
            p_center_two: None,
            one_fifth: None,
        }
    }

    pub fn to_config(&self, budget: u64) -> Result<BsoConfig> {
        let mut cfg = BsoConfig::new(self.variant, self.population, budget);
        cfg.clustering.cluster_count = self.clusters;
        cfg.ladder = StrategyLadder::new(self.ladder_k, self.ladder_h, self.ladder_m)
            .map_err(|e| CliError::Validation(format!("algorithms.{}: {e}", self.name)))?;
        cfg.memory_length = self.memory_length;
        if let Some(p) = self.p_replace {
            cfg.p_replace = p;
        }
        if let Some(p) = self.p_one_cluster {
            cfg.p_one_cluster = p;
        }
        if let Some(p) = self.p_center_one {
            cfg.p_center_one = p;
        }
        if let Some(p) = self.p_center_two {
            cfg.p_center_two = p;
        }
        if let Some(of) = self.one_fifth {
            cfg.one_fifth = of;
        }
        cfg.validate()
            .map_err(|e| CliError::Validation(format!("algorithms.{}: {e}", self.name)))?;
        Ok(cfg)
    }
}

impl ExperimentManifest {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        let manifest: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("parsing {}: {e}", path.display())))?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn resolved_seeds(&self) -> Vec<u64> {
        match &self.seeds {
            Some(s) => s.clone(),
            None => (0..self.seed_count as u64).map(|i| self.seed_base + i).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(CliError::Validation("algorithms: list is empty".into()));
        }
        let mut names: Vec<&str> = self.algorithms.iter().map(|a| a.name.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != self.algorithms.len() {
            return Err(CliError::Validation("algorithms: names must be distinct".into()));
        }
        if self.functions.is_empty() {
            return Err(CliError::Validation("functions: list is empty".into()));
        }
        for f in &self.functions {
            BaseFunction::from_name(&f.function)
                .map_err(|e| CliError::Validation(format!("functions: {e}")))?;
        }
        if self.dimensions.is_empty() || self.dimensions.iter().any(|d| *d == 0) {
            return Err(CliError::Validation(
                "dimensions: list must be non-empty with positive entries".into(),
            ));
        }
        let seeds = self.resolved_seeds();
        if seeds.is_empty() {
            return Err(CliError::Validation("seeds: list is empty".into()));
        }
        let mut unique = seeds.clone();
        unique.sort_unstable();
        unique.dedup();
        if unique.len() != seeds.len() {
            return Err(CliError::Validation("seeds: entries must be distinct".into()));
        }
        if self.budget_multiplier == 0 {
            return Err(CliError::Validation("budget_multiplier: must be at least 1".into()));
        }
        Ok(())
    }

    /// The desk-scale default: classic BSO vs ASBSO on the shifted-rotated
    /// catalog functions with a reduced budget multiplier.
    /// Desk-scale runs cap the budget at 2000·D evaluations, so the default
    /// grid uses a compact population: it trades parallel sampling for a much
    /// longer iteration horizon, which is where the step-size schedules (and
    /// their adaptive selection) actually differentiate the variants.
    pub fn desk_default() -> Self {
        Self {
            algorithms: vec![
                AlgorithmSpec {
                    population: DESK_POPULATION,
                    clusters: DESK_CLUSTERS,
                    ..AlgorithmSpec::new("classic_bso", Variant::ClassicBso)
                },
                AlgorithmSpec {
                    population: DESK_POPULATION,
                    clusters: DESK_CLUSTERS,
                    ..AlgorithmSpec::new("asbso", Variant::AsbsoIms)
                },
            ],
            functions: bso_core::benchmarks::ALL_FUNCTIONS
                .into_iter()
                .flat_map(|f| {
                    [
                        FunctionRef {
                            function: f.name().to_string(),
                            transform: TransformKind::Identity,
                            transform_seed: None,
                            bias: None,
                        },
                        FunctionRef {
                            function: f.name().to_string(),
                            transform: TransformKind::ShiftedRotated,
                            transform_seed: None,
                            bias: None,
                        },
                    ]
                })
                .collect(),
            dimensions: vec![10, 30],
            seeds: None,
            seed_count: default_seed_count(),
            seed_base: default_seed_base(),
            budget_multiplier: 2000,
            catalog_seed: DEFAULT_CATALOG_SEED,
            output_dir: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_default_is_valid() {
        let m = ExperimentManifest::desk_default();
        m.validate().unwrap();
        assert_eq!(m.functions.len(), 14);
        assert_eq!(m.resolved_seeds().len(), 30);
    }

    #[test]
    fn validation_names_the_offending_field() {
        let mut m = ExperimentManifest::desk_default();
        m.dimensions = vec![];
        let err = m.validate().unwrap_err();
        assert!(err.to_string().contains("dimensions"));

        let mut m = ExperimentManifest::desk_default();
        m.seeds = Some(vec![1, 1]);
        let err = m.validate().unwrap_err();
        assert!(err.to_string().contains("seeds"));

        let mut m = ExperimentManifest::desk_default();
        m.functions[0].function = "warped_cube".into();
        let err = m.validate().unwrap_err();
        assert!(err.to_string().contains("warped_cube"));
    }

    #[test]
    fn manifest_round_trips_through_json() {
        let m = ExperimentManifest::desk_default();
        let text = serde_json::to_string_pretty(&m).unwrap();
        let back: ExperimentManifest = serde_json::from_str(&text).unwrap();
        back.validate().unwrap();
        assert_eq!(back.algorithms.len(), 2);
        assert_eq!(back.budget_multiplier, 2000);
    }

    #[test]
    fn function_ref_resolves_with_catalog_seed_rule() {
        let fr = FunctionRef {
            function: "rastrigin".into(),
            transform: TransformKind::ShiftedRotated,
            transform_seed: None,
            bias: None,
        };
        let spec = fr.resolve(10, DEFAULT_CATALOG_SEED).unwrap();
        let catalog = bso_core::benchmarks::batch_catalog(DEFAULT_CATALOG_SEED);
        assert!(catalog.contains(&spec));
    }
}
