use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bso_cli::error::{CliError, Result};
use bso_cli::manifest::ExperimentManifest;
use bso_cli::report::{compare, sweep, SweepParam, TestKind};
use bso_cli::runner::{read_trials, run_manifest};
use bso_core::benchmarks::{batch_catalog, DEFAULT_CATALOG_SEED};

#[derive(Parser)]
#[command(name = "asbso", about = "Brain storm optimization experiment harness", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonFlags {
    /// Output directory for result files.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Worker-thread count for dispatching independent runs.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Override the manifest's first seed.
    #[arg(long)]
    seed_base: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an experiment manifest and write trials/convergence/summary CSVs.
    Run {
        manifest: PathBuf,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Compare algorithms in a trials file against a control.
    Compare {
        trials: PathBuf,
        #[arg(long)]
        control: String,
        #[arg(long, default_value = "wilcoxon")]
        test: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run a manifest's first algorithm across parameter values and rank them.
    Sweep {
        manifest: PathBuf,
        /// One of H, k, M, L, C.
        #[arg(long)]
        param: String,
        /// Comma-separated values for the swept parameter.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Print the benchmark catalog as a JSON manifest.
    Catalog {
        #[arg(long, default_value_t = DEFAULT_CATALOG_SEED)]
        catalog_seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load_manifest(path: &PathBuf, common: &CommonFlags) -> Result<ExperimentManifest> {
    let mut manifest = ExperimentManifest::from_file(path)?;
    if let Some(base) = common.seed_base {
        manifest.seed_base = base;
        manifest.seeds = None;
        manifest.validate()?;
    }
    Ok(manifest)
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { manifest, common } => {
            let m = load_manifest(&manifest, &common)?;
            let out = m
                .output_dir
                .as_ref()
                .map(PathBuf::from)
                .unwrap_or_else(|| common.out.clone());
            let artifacts = run_manifest(&m, &out, common.workers)?;
            println!(
                "{} runs -> {}",
                artifacts.trials.len(),
                artifacts.output_dir.display()
            );
            Ok(())
        }
        Command::Compare { trials, control, test, out } => {
            let kind: TestKind = test.parse()?;
            let rows = read_trials(&trials)?;
            let report = compare(&rows, &control, kind)?;
            print!("{}", report.render_text());
            if let Some(dir) = out {
                report.write(&dir, "compare")?;
            }
            Ok(())
        }
        Command::Sweep { manifest, param, values, common } => {
            let m = load_manifest(&manifest, &common)?;
            let param: SweepParam = param.parse()?;
            let report = sweep(&m, param, &values, &common.out, common.workers)?;
            print!("{}", report.render_text());
            report.write(&common.out, "sweep")?;
            Ok(())
        }
        Command::Catalog { catalog_seed } => {
            let catalog = batch_catalog(catalog_seed);
            let json = serde_json::to_string_pretty(&catalog)
                .map_err(|e| CliError::Io(e.to_string()))?;
            println!("{json}");
            Ok(())
        }
    }
}
