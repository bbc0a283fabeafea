pub mod error;
pub mod manifest;
pub mod report;
pub mod runner;

pub use error::{CliError, Result};
pub use manifest::{AlgorithmSpec, ExperimentManifest, FunctionRef, TransformKind};
pub use report::{compare, sweep, CompareReport, SweepParam, TestKind};
pub use runner::{read_trials, run_manifest, RunArtifacts, TrialRecord};
