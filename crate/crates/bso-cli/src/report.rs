//! Comparison reports over trial results.
//!
//! Pairing unit is the (function, dimension) cell; each cell contributes the
//! mean best fitness over its seeds. Wilcoxon compares the control against
//! every other algorithm per dimension; Friedman ranks all algorithms over
//! every cell and tests each against the control.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use bso_core::stats::friedman::friedman_with_posthoc;
use bso_core::stats::wilcoxon::wilcoxon_signed_rank;

use crate::error::{CliError, Result};
use crate::manifest::ExperimentManifest;
use crate::runner::{format_float, run_manifest, TrialRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    Wilcoxon,
    Friedman,
}

impl std::str::FromStr for TestKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wilcoxon" => Ok(Self::Wilcoxon),
            "friedman" => Ok(Self::Friedman),
            other => Err(CliError::Validation(format!(
                "unknown test '{other}' (expected wilcoxon or friedman)"
            ))),
        }
    }
}

/// Mean best fitness per (algorithm, function, dim) cell, plus the common
/// cell grid, extracted and cross-checked from raw trial rows.
pub struct CellTable {
    pub algorithms: Vec<String>,
    /// Sorted (function, dim) keys shared by every algorithm.
    pub cells: Vec<(String, usize)>,
    /// `means[alg][cell]`, indexed parallel to `algorithms` and `cells`.
    pub means: Vec<Vec<f64>>,
}

pub fn build_cell_table(trials: &[TrialRecord]) -> Result<CellTable> {
    let mut per_alg: BTreeMap<&str, BTreeMap<(String, usize), Vec<f64>>> = BTreeMap::new();
    for t in trials {
        per_alg
            .entry(&t.algorithm)
            .or_default()
            .entry((t.function.clone(), t.dim))
            .or_default()
            .push(t.best_fitness);
    }
    if per_alg.len() < 2 {
        return Err(CliError::Validation(format!(
            "need at least 2 algorithms in the trials file, found {}",
            per_alg.len()
        )));
    }
    let algorithms: Vec<String> = per_alg.keys().map(|s| s.to_string()).collect();
    let cells: Vec<(String, usize)> = per_alg.values().next().unwrap().keys().cloned().collect();
    let mut missing = Vec::new();
    for (alg, table) in &per_alg {
        for cell in &cells {
            if !table.contains_key(cell) {
                missing.push(format!("{alg} lacks {} D={}", cell.0, cell.1));
            }
        }
        for cell in table.keys() {
            if !cells.contains(cell) {
                missing.push(format!(
                    "{} lacks {} D={}",
                    algorithms[0], cell.0, cell.1
                ));
            }
        }
    }
    if !missing.is_empty() {
        return Err(CliError::Validation(format!(
            "algorithms cover different function sets: {}",
            missing.join("; ")
        )));
    }
    let means = algorithms
        .iter()
        .map(|alg| {
            cells
                .iter()
                .map(|cell| {
                    let v = &per_alg[alg.as_str()][cell];
                    v.iter().sum::<f64>() / v.len() as f64
                })
                .collect()
        })
        .collect();
    Ok(CellTable { algorithms, cells, means })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WilcoxonRow {
    pub dim: usize,
    pub algorithm: String,
    pub n: usize,
    pub r_plus: f64,
    pub r_minus: f64,
    pub p_value: f64,
    pub significant_005: bool,
    pub significant_001: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FriedmanRankRow {
    pub algorithm: String,
    pub mean_rank: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FriedmanCompareRow {
    pub algorithm: String,
    pub z: f64,
    pub p_unadjusted: f64,
    pub p_bonferroni: f64,
    pub p_holm: f64,
    pub p_hochberg: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareReport {
    pub test: String,
    pub control: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub wilcoxon: Vec<WilcoxonRow>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub friedman_ranks: Vec<FriedmanRankRow>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub friedman_comparisons: Vec<FriedmanCompareRow>,
}

pub fn compare(trials: &[TrialRecord], control: &str, test: TestKind) -> Result<CompareReport> {
    let table = build_cell_table(trials)?;
    let control_idx = table
        .algorithms
        .iter()
        .position(|a| a == control)
        .ok_or_else(|| {
            CliError::Validation(format!(
                "control algorithm '{control}' not in trials file (have: {})",
                table.algorithms.join(", ")
            ))
        })?;

    match test {
        TestKind::Wilcoxon => compare_wilcoxon(&table, control_idx),
        TestKind::Friedman => compare_friedman(&table, control_idx),
    }
}

fn compare_wilcoxon(table: &CellTable, control_idx: usize) -> Result<CompareReport> {
    let mut dims: Vec<usize> = table.cells.iter().map(|(_, d)| *d).collect();
    dims.sort_unstable();
    dims.dedup();

    let mut rows = Vec::new();
    for &dim in &dims {
        let idx: Vec<usize> = table
            .cells
            .iter()
            .enumerate()
            .filter(|(_, (_, d))| *d == dim)
            .map(|(i, _)| i)
            .collect();
        let control_means: Vec<f64> = idx.iter().map(|&i| table.means[control_idx][i]).collect();
        for (a, name) in table.algorithms.iter().enumerate() {
            if a == control_idx {
                continue;
            }
            let other: Vec<f64> = idx.iter().map(|&i| table.means[a][i]).collect();
            let w = wilcoxon_signed_rank(&control_means, &other)?;
            rows.push(WilcoxonRow {
                dim,
                algorithm: name.clone(),
                n: w.n_effective,
                r_plus: w.r_plus,
                r_minus: w.r_minus,
                p_value: w.p_value,
                significant_005: w.p_value < 0.05,
                significant_001: w.p_value < 0.01,
            });
        }
    }
    Ok(CompareReport {
        test: "wilcoxon".into(),
        control: table.algorithms[control_idx].clone(),
        wilcoxon: rows,
        friedman_ranks: Vec::new(),
        friedman_comparisons: Vec::new(),
    })
}

fn compare_friedman(table: &CellTable, control_idx: usize) -> Result<CompareReport> {
    // Rows are cells, columns are algorithms.
    let matrix: Vec<Vec<f64>> = (0..table.cells.len())
        .map(|c| table.means.iter().map(|row| row[c]).collect())
        .collect();
    let result = friedman_with_posthoc(&matrix, control_idx)?;
    let ranks = table
        .algorithms
        .iter()
        .zip(&result.average_ranks)
        .map(|(a, r)| FriedmanRankRow { algorithm: a.clone(), mean_rank: *r })
        .collect();
    let comparisons = result
        .comparisons
        .iter()
        .map(|c| FriedmanCompareRow {
            algorithm: table.algorithms[c.index].clone(),
            z: c.z,
            p_unadjusted: c.p_unadjusted,
            p_bonferroni: c.p_bonferroni,
            p_holm: c.p_holm,
            p_hochberg: c.p_hochberg,
        })
        .collect();
    Ok(CompareReport {
        test: "friedman".into(),
        control: table.algorithms[control_idx].clone(),
        wilcoxon: Vec::new(),
        friedman_ranks: ranks,
        friedman_comparisons: comparisons,
    })
}

impl CompareReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        match self.test.as_str() {
            "wilcoxon" => {
                writeln!(out, "Wilcoxon signed-rank, control = {}", self.control).unwrap();
                writeln!(
                    out,
                    "{:>4} {:<20} {:>4} {:>8} {:>8} {:>12} {:>7} {:>7}",
                    "D", "vs", "n", "R+", "R-", "p", "a=0.05", "a=0.01"
                )
                .unwrap();
                for r in &self.wilcoxon {
                    writeln!(
                        out,
                        "{:>4} {:<20} {:>4} {:>8.1} {:>8.1} {:>12.6e} {:>7} {:>7}",
                        r.dim,
                        r.algorithm,
                        r.n,
                        r.r_plus,
                        r.r_minus,
                        r.p_value,
                        if r.significant_005 { "YES" } else { "NO" },
                        if r.significant_001 { "YES" } else { "NO" },
                    )
                    .unwrap();
                }
            }
            _ => {
                writeln!(out, "Friedman ranking, control = {}", self.control).unwrap();
                writeln!(out, "{:<20} {:>10}", "algorithm", "mean rank").unwrap();
                for r in &self.friedman_ranks {
                    writeln!(out, "{:<20} {:>10.4}", r.algorithm, r.mean_rank).unwrap();
                }
                if !self.friedman_comparisons.is_empty() {
                    writeln!(out).unwrap();
                    writeln!(
                        out,
                        "{:<20} {:>8} {:>12} {:>12} {:>12} {:>12}",
                        "vs control", "z", "p", "bonferroni", "holm", "hochberg"
                    )
                    .unwrap();
                    for c in &self.friedman_comparisons {
                        writeln!(
                            out,
                            "{:<20} {:>8.4} {:>12.6e} {:>12.6e} {:>12.6e} {:>12.6e}",
                            c.algorithm, c.z, c.p_unadjusted, c.p_bonferroni, c.p_holm, c.p_hochberg
                        )
                        .unwrap();
                    }
                }
            }
        }
        out
    }

    /// Writes the plain-text table and its JSON twin next to each other.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;
        std::fs::write(dir.join(format!("{stem}.txt")), self.render_text())
            .map_err(|e| CliError::Io(e.to_string()))?;
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Io(e.to_string()))?;
        std::fs::write(dir.join(format!("{stem}.json")), json)
            .map_err(|e| CliError::Io(e.to_string()))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    H,
    K,
    M,
    L,
    C,
}

impl std::str::FromStr for SweepParam {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H" | "h" => Ok(Self::H),
            "k" | "K" => Ok(Self::K),
            "M" | "m" => Ok(Self::M),
            "L" | "l" => Ok(Self::L),
            "C" | "c" => Ok(Self::C),
            other => Err(CliError::Validation(format!(
                "unknown sweep parameter '{other}' (expected one of H, k, M, L, C)"
            ))),
        }
    }
}

impl SweepParam {
    pub fn label(&self) -> &'static str {
        match self {
            Self::H => "H",
            Self::K => "k",
            Self::M => "M",
            Self::L => "L",
            Self::C => "C",
        }
    }

    fn requires_integer(&self) -> bool {
        matches!(self, Self::M | Self::L | Self::C)
    }
}

/// Expands the base manifest's first algorithm into one column per swept
/// value, runs the combined grid, and reports a Friedman comparison across
/// the values (control = first value). A single value degenerates to a
/// rank-only report.
pub fn sweep(
    manifest: &ExperimentManifest,
    param: SweepParam,
    values: &[f64],
    output_dir: &Path,
    workers: usize,
) -> Result<CompareReport> {
    if values.is_empty() {
        return Err(CliError::Validation("sweep values: list is empty".into()));
    }
    let base = manifest
        .algorithms
        .first()
        .ok_or_else(|| CliError::Validation("algorithms: list is empty".into()))?;

    let mut swept = manifest.clone();
    swept.algorithms = Vec::new();
    for &v in values {
        if !v.is_finite() || v <= 0.0 {
            return Err(CliError::Validation(format!(
                "sweep values: {v} is not a positive finite number"
            )));
        }
        if param.requires_integer() && v.fract() != 0.0 {
            return Err(CliError::Validation(format!(
                "sweep values: {} must be an integer, got {v}",
                param.label()
            )));
        }
        let mut alg = base.clone();
        alg.name = format!("{}={}", param.label(), format_value(param, v));
        match param {
            SweepParam::H => alg.ladder_h = v,
            SweepParam::K => alg.ladder_k = v,
            SweepParam::M => alg.ladder_m = v as usize,
            SweepParam::L => alg.memory_length = v as usize,
            SweepParam::C => alg.clusters = v as usize,
        }
        // Fail fast on values the engine would reject.
        alg.to_config(manifest.budget_multiplier * manifest.dimensions[0] as u64)?;
        swept.algorithms.push(alg);
    }

    let artifacts = run_manifest(&swept, output_dir, workers)?;
    if values.len() == 1 {
        let table = single_column_report(&artifacts.trials, &swept.algorithms[0].name)?;
        return Ok(table);
    }
    compare(&artifacts.trials, &swept.algorithms[0].name, TestKind::Friedman)
}

fn format_value(param: SweepParam, v: f64) -> String {
    if param.requires_integer() || v.fract() == 0.0 {
        format!("{}", v as i64)
    } else {
        format_float(v)
    }
}

fn single_column_report(trials: &[TrialRecord], name: &str) -> Result<CompareReport> {
    if trials.is_empty() {
        return Err(CliError::Validation("sweep produced no trials".into()));
    }
    Ok(CompareReport {
        test: "friedman".into(),
        control: name.to_string(),
        wilcoxon: Vec::new(),
        friedman_ranks: vec![FriedmanRankRow { algorithm: name.to_string(), mean_rank: 1.0 }],
        friedman_comparisons: Vec::new(),
    })
}
