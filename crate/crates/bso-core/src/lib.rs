//! Brain storm optimization with adaptive multi-step-length strategies.
//!
//! The crate bundles the optimizer variants (classic BSO, the improvement- and
//! success/failure-memory adaptive variants, and a 1/5-success-rule hybrid), a
//! seedable benchmark suite with shift/rotation transforms, and the
//! nonparametric statistics used to compare algorithms across problems.

pub mod benchmarks;
pub mod clustering;
pub mod engine;
pub mod error;
pub mod memory;
pub mod objective;
pub mod rng;
pub mod stats;
pub mod step;
pub mod types;

pub use engine::{run, BsoConfig, ConvergenceTrace, RunOutcome, Variant};
pub use error::{Error, Result};
pub use objective::ObjectiveFunction;
pub use types::{Bounds, Individual, Population};
