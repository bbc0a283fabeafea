//! Grid execution and CSV serialization.
//!
//! Runs are dispatched to a bounded worker pool; every run is deterministic in
//! its own seed, and rows are sorted by (algorithm, function, dim, seed)
//! before writing, so any worker count produces identical files. Measured
//! wall times are volatile and therefore live in a separate `timings.csv`;
//! the `wall_ms` column of `trials.csv` is pinned to zero to keep that file
//! reproducible byte for byte.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use bso_core::benchmarks::make_benchmark;
use bso_core::engine::run;

use crate::error::{CliError, Result};
use crate::manifest::ExperimentManifest;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub run_id: u64,
    pub algorithm: String,
    pub function: String,
    pub dim: usize,
    pub seed: u64,
    pub best_fitness: f64,
    pub evals_used: u64,
    pub wall_ms: u64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub run_id: u64,
    pub evals: u64,
    pub best_fitness: f64,
}

#[derive(Debug)]
pub struct RunArtifacts {
    pub output_dir: PathBuf,
    pub trials_path: PathBuf,
    pub convergence_path: PathBuf,
    pub summary_path: PathBuf,
    pub trials: Vec<TrialRecord>,
}

struct Job {
    run_id: u64,
    algorithm: usize,
    function: usize,
    dim: usize,
    seed: u64,
}

pub fn run_manifest(
    manifest: &ExperimentManifest,
    output_dir: &Path,
    workers: usize,
) -> Result<RunArtifacts> {
    manifest.validate()?;
    let workers = workers.max(1);
    std::fs::create_dir_all(output_dir)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", output_dir.display())))?;

    let seeds = manifest.resolved_seeds();
    let mut jobs = Vec::new();
    let mut run_id = 0u64;
    for algorithm in 0..manifest.algorithms.len() {
        for function in 0..manifest.functions.len() {
            for &dim in &manifest.dimensions {
                for &seed in &seeds {
                    jobs.push(Job { run_id, algorithm, function, dim, seed });
                    run_id += 1;
                }
            }
        }
    }

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(TrialRecord, Vec<ConvergenceRow>)>> =
        Mutex::new(Vec::with_capacity(jobs.len()));
    let failure: Mutex<Option<CliError>> = Mutex::new(None);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let job = &jobs[i];
                match execute(manifest, job) {
                    Ok(entry) => results.lock().unwrap().push(entry),
                    Err(e) => {
                        *failure.lock().unwrap() = Some(e);
                        next.store(jobs.len(), Ordering::Relaxed);
                        break;
                    }
                }
            });
        }
    });

    if let Some(err) = failure.into_inner().unwrap() {
        return Err(err);
    }
    let mut collected = results.into_inner().unwrap();
    collected.sort_by(|(a, _), (b, _)| {
        (&a.algorithm, &a.function, a.dim, a.seed).cmp(&(&b.algorithm, &b.function, b.dim, b.seed))
    });

    let trials: Vec<TrialRecord> = collected.iter().map(|(t, _)| t.clone()).collect();
    let trials_path = output_dir.join("trials.csv");
    write_trials(&trials_path, &trials)?;
    let convergence_path = output_dir.join("convergence.csv");
    write_convergence(&convergence_path, &collected)?;
    let summary_path = output_dir.join("summary.csv");
    write_summary(&summary_path, &trials)?;
    write_timings(&output_dir.join("timings.csv"), &collected)?;

    Ok(RunArtifacts {
        output_dir: output_dir.to_path_buf(),
        trials_path,
        convergence_path,
        summary_path,
        trials,
    })
}

fn execute(
    manifest: &ExperimentManifest,
    job: &Job,
) -> Result<(TrialRecord, Vec<ConvergenceRow>)> {
    let algorithm = &manifest.algorithms[job.algorithm];
    let spec = manifest.functions[job.function].resolve(job.dim, manifest.catalog_seed)?;
    let benchmark = make_benchmark(&spec)?;
    let budget = manifest.budget_multiplier * job.dim as u64;
    let cfg = algorithm.to_config(budget)?;

    let start = Instant::now();
    let outcome = run(&benchmark, &cfg, job.seed)?;
    let wall_ms = start.elapsed().as_millis() as u64;

    let record = TrialRecord {
        run_id: job.run_id,
        algorithm: algorithm.name.clone(),
        function: spec.label(),
        dim: job.dim,
        seed: job.seed,
        best_fitness: outcome.best.fitness,
        evals_used: outcome.evaluations_used,
        wall_ms,
    };
    let trace = outcome
        .trace
        .samples
        .iter()
        .map(|&(evals, best_fitness)| ConvergenceRow { run_id: job.run_id, evals, best_fitness })
        .collect();
    Ok((record, trace))
}

fn write_trials(path: &Path, trials: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["run_id", "algorithm", "function", "dim", "seed", "best_fitness", "evals_used", "wall_ms"])?;
    for t in trials {
        w.write_record([
            t.run_id.to_string(),
            t.algorithm.clone(),
            t.function.clone(),
            t.dim.to_string(),
            t.seed.to_string(),
            format_float(t.best_fitness),
            t.evals_used.to_string(),
            "0".to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_convergence(path: &Path, rows: &[(TrialRecord, Vec<ConvergenceRow>)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["run_id", "evals", "best_fitness"])?;
    for (_, trace) in rows {
        for r in trace {
            w.write_record([
                r.run_id.to_string(),
                r.evals.to_string(),
                format_float(r.best_fitness),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_timings(path: &Path, rows: &[(TrialRecord, Vec<ConvergenceRow>)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["run_id", "wall_ms"])?;
    for (t, _) in rows {
        w.write_record([t.run_id.to_string(), t.wall_ms.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-cell aggregates over seeds.
fn write_summary(path: &Path, trials: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["algorithm", "function", "dim", "mean", "std", "min", "median", "max"])?;
    let mut i = 0;
    while i < trials.len() {
        let key = (&trials[i].algorithm, &trials[i].function, trials[i].dim);
        let mut j = i;
        while j < trials.len()
            && (&trials[j].algorithm, &trials[j].function, trials[j].dim) == key
        {
            j += 1;
        }
        let mut values: Vec<f64> = trials[i..j].iter().map(|t| t.best_fitness).collect();
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite fitness"));
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let median = if values.len() % 2 == 1 {
            values[values.len() / 2]
        } else {
            0.5 * (values[values.len() / 2 - 1] + values[values.len() / 2])
        };
        w.write_record([
            key.0.clone(),
            key.1.clone(),
            key.2.to_string(),
            format_float(mean),
            format_float(std),
            format_float(values[0]),
            format_float(median),
            format_float(*values.last().unwrap()),
        ])?;
        i = j;
    }
    w.flush()?;
    Ok(())
}

/// Shortest round-trippable decimal representation.
pub fn format_float(v: f64) -> String {
    let mut buf = ryu_like(v);
    if !buf.contains('.') && !buf.contains('e') && !buf.contains("inf") && !buf.contains("NaN") {
        buf.push_str(".0");
    }
    buf
}

fn ryu_like(v: f64) -> String {
    format!("{v}")
}

/// The harness's own trials reader; every emitted file round-trips.
pub fn read_trials(path: &Path) -> Result<Vec<TrialRecord>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for row in reader.deserialize::<TrialRecord>() {
        out.push(row?);
    }
    Ok(out)
}
