//! Classical test functions with seeded shift/rotation transforms.
//!
//! Every instance evaluates `base(Q * (x - o)) + bias` where `Q` is a seeded
//! orthogonal matrix and `o` a seeded interior shift, so the optimum and its
//! value stay known by construction. Base formulas are the standard textbook
//! definitions, each normalized to have its minimum value 0 at the origin.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::ObjectiveFunction;
use crate::types::Bounds;

const SCHWEFEL_OPTIMUM: f64 = 420.968746227504;
const WEIERSTRASS_A: f64 = 0.5;
const WEIERSTRASS_B: f64 = 3.0;
const WEIERSTRASS_KMAX: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseFunction {
    Sphere,
    Rosenbrock,
    Rastrigin,
    Ackley,
    Griewank,
    Schwefel226,
    Weierstrass,
}

pub const ALL_FUNCTIONS: [BaseFunction; 7] = [
    BaseFunction::Sphere,
    BaseFunction::Rosenbrock,
    BaseFunction::Rastrigin,
    BaseFunction::Ackley,
    BaseFunction::Griewank,
    BaseFunction::Schwefel226,
    BaseFunction::Weierstrass,
];

impl BaseFunction {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Sphere => "sphere",
            Self::Rosenbrock => "rosenbrock",
            Self::Rastrigin => "rastrigin",
            Self::Ackley => "ackley",
            Self::Griewank => "griewank",
            Self::Schwefel226 => "schwefel_226",
            Self::Weierstrass => "weierstrass",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        ALL_FUNCTIONS
            .iter()
            .copied()
            .find(|f| f.name() == name)
            .ok_or_else(|| Error::Config(format!("unknown benchmark function `{name}`")))
    }

    /// Half-width of the conventional symmetric domain.
    pub fn domain_half_width(&self) -> f64 {
        match self {
            Self::Schwefel226 => 500.0,
            _ => 100.0,
        }
    }

    fn evaluate(&self, z: &[f64]) -> f64 {
        match self {
            Self::Sphere => z.iter().map(|v| v * v).sum(),
            Self::Rosenbrock => {
                // Optimum moved to the origin via y = z + 1.
                let y: Vec<f64> = z.iter().map(|v| v + 1.0).collect();
                y.windows(2)
                    .map(|w| {
                        let a = w[1] - w[0] * w[0];
                        let b = 1.0 - w[0];
                        100.0 * a * a + b * b
                    })
                    .sum()
            }
            Self::Rastrigin => z
                .iter()
                .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos() + 10.0)
                .sum(),
            Self::Ackley => {
                let d = z.len() as f64;
                let sum_sq: f64 = z.iter().map(|v| v * v).sum();
                let sum_cos: f64 =
                    z.iter().map(|v| (2.0 * std::f64::consts::PI * v).cos()).sum();
                -20.0 * (-0.2 * (sum_sq / d).sqrt()).exp() - (sum_cos / d).exp()
                    + 20.0
                    + std::f64::consts::E
            }
            Self::Griewank => {
                let sum: f64 = z.iter().map(|v| v * v).sum::<f64>() / 4000.0;
                let prod: f64 = z
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
                    .product();
                sum - prod + 1.0
            }
            Self::Schwefel226 => {
                // Per-dimension term normalized so the origin scores zero.
                // Outside the native [-500, 500] range (where the raw formula
                // has spurious deeper minima) the term freezes at the boundary
                // value plus a quadratic penalty, so the origin stays the
                // global minimum.
                let h = |v: f64| -v * v.abs().sqrt().sin();
                let h_opt = h(SCHWEFEL_OPTIMUM);
                z.iter()
                    .map(|&v| {
                        let y = v + SCHWEFEL_OPTIMUM;
                        if y.abs() <= 500.0 {
                            h(y) - h_opt
                        } else {
                            h(500.0_f64.copysign(y)) - h_opt
                                + (y.abs() - 500.0).powi(2) / 10_000.0
                        }
                    })
                    .sum()
            }
            Self::Weierstrass => {
                let two_pi = 2.0 * std::f64::consts::PI;
                let mut constant = 0.0;
                let mut total = 0.0;
                for k in 0..=WEIERSTRASS_KMAX {
                    let ak = WEIERSTRASS_A.powi(k as i32);
                    let bk = WEIERSTRASS_B.powi(k as i32);
                    constant += ak * (two_pi * bk * 0.5).cos();
                    for v in z {
                        total += ak * (two_pi * bk * (v + 0.5)).cos();
                    }
                }
                total - z.len() as f64 * constant
            }
        }
    }
}

/// Serializable description from which a benchmark instance is rebuilt
/// bit-exactly: the transform is regenerated from `transform_seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSpec {
    pub function: BaseFunction,
    pub dim: usize,
    /// `None` means the identity transform (no shift, no rotation, bias 0).
    pub transform_seed: Option<u64>,
    pub bias: f64,
}

impl BenchmarkSpec {
    pub fn identity(function: BaseFunction, dim: usize) -> Self {
        Self { function, dim, transform_seed: None, bias: 0.0 }
    }

    pub fn shifted_rotated(function: BaseFunction, dim: usize, seed: u64, bias: f64) -> Self {
        Self { function, dim, transform_seed: Some(seed), bias }
    }

    /// Instance label used in result files: the base name, with a `_sr`
    /// suffix for shifted-rotated variants.
    pub fn label(&self) -> String {
        match self.transform_seed {
            None => self.function.name().to_string(),
            Some(_) => format!("{}_sr", self.function.name()),
        }
    }
}

/// A concrete, immutable benchmark instance.
pub struct Benchmark {
    spec: BenchmarkSpec,
    label: String,
    bounds: Bounds,
    shift: Vec<f64>,
    /// Row-major D×D orthogonal matrix; `None` for the identity.
    rotation: Option<Vec<f64>>,
}

impl Benchmark {
    pub fn spec(&self) -> &BenchmarkSpec {
        &self.spec
    }

    /// The constructed optimum location (the shift vector).
    pub fn optimum(&self) -> &[f64] {
        &self.shift
    }

    pub fn rotation(&self) -> Option<&[f64]> {
        self.rotation.as_deref()
    }
}

impl ObjectiveFunction for Benchmark {
    fn name(&self) -> &str {
        &self.label
    }

    fn dim(&self) -> usize {
        self.spec.dim
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        let d = self.spec.dim;
        let centered: Vec<f64> = x.iter().zip(&self.shift).map(|(v, o)| v - o).collect();
        let z = match &self.rotation {
            None => centered,
            Some(q) => {
                let mut out = vec![0.0; d];
                for (r, o) in out.iter_mut().enumerate() {
                    let row = &q[r * d..(r + 1) * d];
                    *o = row.iter().zip(&centered).map(|(a, b)| a * b).sum();
                }
                out
            }
        };
        self.spec.function.evaluate(&z) + self.spec.bias
    }
}

/// Orthonormalizes a seeded Gaussian matrix by modified Gram-Schmidt.
fn random_rotation(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut rows: Vec<Vec<f64>> = (0..dim)
        .map(|_| (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    for i in 0..dim {
        for j in 0..i {
            let proj: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
            for k in 0..dim {
                rows[i][k] -= proj * rows[j][k];
            }
        }
        let norm: f64 = rows[i].iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in rows[i].iter_mut() {
            *v /= norm;
        }
    }
    rows.into_iter().flatten().collect()
}

/// Builds the objective described by `spec`. Deterministic in the spec.
pub fn make_benchmark(spec: &BenchmarkSpec) -> Result<Benchmark> {
    if spec.dim == 0 {
        return Err(Error::Config("benchmark dimension must be at least 1".into()));
    }
    let half = spec.function.domain_half_width();
    let bounds = Bounds::symmetric(spec.dim, half)?;
    let (shift, rotation) = match spec.transform_seed {
        None => (vec![0.0; spec.dim], None),
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // Shift drawn from the central 80% of the box.
            let shift: Vec<f64> = (0..spec.dim)
                .map(|_| (rng.random::<f64>() * 1.6 - 0.8) * half)
                .collect();
            let rotation = random_rotation(spec.dim, &mut rng);
            (shift, Some(rotation))
        }
    };
    Ok(Benchmark {
        label: spec.label(),
        spec: spec.clone(),
        bounds,
        shift,
        rotation,
    })
}

/// Transform seed used by the default catalog for `(function, dim)` under a
/// given catalog seed; manifests without an explicit seed use the same rule.
pub fn default_transform_seed(catalog_seed: u64, function: BaseFunction, dim: usize) -> u64 {
    let fi = ALL_FUNCTIONS.iter().position(|f| *f == function).expect("known function") as u64;
    catalog_seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(fi * 1009 + dim as u64)
}

/// Bias assigned to shifted-rotated catalog entries, one plateau per function.
pub fn default_bias(function: BaseFunction) -> f64 {
    let fi = ALL_FUNCTIONS.iter().position(|f| *f == function).expect("known function");
    100.0 * (fi + 1) as f64
}

/// Default experiment catalog: every base function at D in {10, 30}, identity
/// and shifted-rotated, deterministic in `seed`.
pub fn batch_catalog(seed: u64) -> Vec<BenchmarkSpec> {
    let mut specs = Vec::new();
    for function in ALL_FUNCTIONS {
        for dim in [10usize, 30] {
            specs.push(BenchmarkSpec::identity(function, dim));
            specs.push(BenchmarkSpec::shifted_rotated(
                function,
                dim,
                default_transform_seed(seed, function, dim),
                default_bias(function),
            ));
        }
    }
    specs
}

pub const DEFAULT_CATALOG_SEED: u64 = 47;
