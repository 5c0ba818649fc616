//! `qsbm`: run, validate and summarize sweep experiments.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qsbm::experiments::{run_experiment, summarize, ExperimentConfig, RunOptions};

#[derive(Parser)]
#[command(name = "qsbm", version, about = "Quantum scrambling Born machine experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run (or resume) the sweep described by a JSON config.
    Run {
        config: PathBuf,
        /// Complete the missing (point, seed) jobs of an existing output directory.
        #[arg(long)]
        resume: bool,
        /// Print the resolved sweep table and exit without writing anything.
        #[arg(long)]
        dry_run: bool,
        /// Worker threads (default: all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Output directory (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides `train.root_seed`.
        #[arg(long, env = "QSBM_SEED", hide_env_values = true)]
        seed: Option<u64>,
    },
    /// Recompute summary.csv from results.csv.
    Summarize { dir: PathBuf },
    /// Parse and check a config without running it.
    Validate { config: PathBuf },
}

fn load(path: &Path) -> Result<ExperimentConfig, String> {
    ExperimentConfig::load(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn execute(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Run { config, resume, dry_run, workers, out, seed } => {
            let mut cfg = load(&config)?;
            if let Some(s) = seed {
                cfg.train.root_seed = s;
            }
            if workers == Some(0) {
                return Err("--workers must be at least 1".into());
            }
            let options = RunOptions { out_dir: out, resume, dry_run, workers };
            let report = run_experiment(&cfg, &options).map_err(|e| e.to_string())?;
            if dry_run {
                print!("{}", report.table);
                println!("root_seed {}; output would go to {}", cfg.train.root_seed, report.out_dir.display());
                return Ok(());
            }
            println!(
                "{}: ran {} of {} jobs; results in {}",
                cfg.name,
                report.jobs_run,
                report.jobs_total,
                report.out_dir.display()
            );
            Ok(())
        }
        Command::Summarize { dir } => {
            let rows = summarize(&dir).map_err(|e| e.to_string())?;
            println!("{:>5}  {:<22} {:>3} {:>4} {:>3} {:>3} {:>7}  kld_exact (mean ± std)", "point", "scrambler", "N_A", "L", "K", "n_h", "tau");
            let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
            for r in &rows {
                println!(
                    "{:>5}  {:<22} {:>3} {:>4} {:>3} {:>3} {:>7}  {:.4e} ± {:.1e}",
                    r.point,
                    if r.model == "rbm" { "rbm" } else { r.scrambler_type.as_str() },
                    opt(r.num_ancillas.map(|v| v.to_string())),
                    opt(r.num_layers.map(|v| v.to_string())),
                    opt(r.depth.map(|v| v.to_string())),
                    opt(r.num_hidden.map(|v| v.to_string())),
                    opt(r.tau.map(|v| v.to_string())),
                    r.kld_exact_mean,
                    r.kld_exact_std
                );
            }
            println!("wrote {}", dir.join("summary.csv").display());
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = load(&config)?;
            let points = qsbm::experiments::expand(&cfg).map_err(|e| e.to_string())?;
            println!(
                "{}: valid {} config, {} points x {} realizations",
                config.display(),
                cfg.kind.name(),
                points.len(),
                cfg.train.num_realizations
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
