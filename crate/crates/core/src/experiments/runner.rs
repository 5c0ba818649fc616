//! Execution of a sweep with resumption and deterministic output.

use std::collections::BTreeSet;
use std::fs::OpenOptions;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde_json::json;

use super::config::ExperimentConfig;
use super::results::*;
use super::sweep::{expand, PointModel, SweepPoint};
use crate::born::{output_distribution, Ansatz, INITIAL_COUPLING};
use crate::error::{Error, Result};
use crate::metrics::{DEFAULT_SMOOTHING, PROB_FLOOR};
use crate::rbm::{params_from_record, train_rbm, RbmConfig};
use crate::rng::RandomStream;
use crate::scramblers::{compile_scrambler, BRICKWORK_PAIRING};
use crate::targets::{TargetDistribution, TargetSpec, DEFAULT_WEIGHT_SEED};
use crate::training::{train, TrainingRecord};

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub resume: bool,
    pub dry_run: bool,
    /// Worker threads; all cores when `None`.
    pub workers: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub points: Vec<SweepPoint>,
    pub jobs_total: usize,
    pub jobs_run: usize,
    /// Resolved sweep table (always filled; the only output of a dry run).
    pub table: String,
    pub summary: Vec<SummaryRow>,
}

/// Target of a sweep point.
pub fn point_target(config: &ExperimentConfig, point: &SweepPoint) -> Result<TargetDistribution> {
    config.target.build(point.target_bits(), point.rho)
}

fn rbm_config(config: &ExperimentConfig, num_hidden: usize) -> RbmConfig {
    RbmConfig { num_hidden, ..config.rbm.clone().unwrap_or_default() }
}

/// Eval epochs a complete job reports.
fn expected_epochs(config: &ExperimentConfig, point: &SweepPoint) -> Vec<usize> {
    match point.model {
        PointModel::Qsbm(_) => config.train.eval_epochs().collect(),
        PointModel::Rbm { num_hidden, .. } => {
            let c = rbm_config(config, num_hidden);
            (0..=c.epochs).step_by(c.eval_every).collect()
        }
    }
}

/// Trains realization `seed` at `point`; returns the record and final distribution.
pub fn run_job(
    config: &ExperimentConfig,
    point: &SweepPoint,
    target: &[f64],
    seed: u64,
) -> Result<(TrainingRecord, Vec<f64>)> {
    let stream = RandomStream::new(config.train.root_seed).substream_index(seed);
    match &point.model {
        PointModel::Qsbm(model) => {
            let scrambler = match &model.ansatz {
                Ansatz::FixedScrambler { scrambler } => {
                    Some(compile_scrambler(scrambler, model.num_qubits, &mut stream.substream("scrambler"))?)
                }
                Ansatz::TrainableHamiltonian { .. } => None,
            };
            let record = train(model, scrambler.as_ref(), target, &config.train, &stream, seed)?;
            let q = output_distribution(model, &record.final_params, scrambler.as_ref())?;
            Ok((record, q))
        }
        PointModel::Rbm { num_visible, num_hidden } => {
            let record = train_rbm(target, &rbm_config(config, *num_hidden), &stream, seed)?;
            let q = params_from_record(&record, *num_visible, *num_hidden)?.exact_distribution();
            Ok((record, q))
        }
    }
}

/// Settings that change numbers but are not part of the config document.
pub fn decision_stamps(config: &ExperimentConfig) -> serde_json::Value {
    let weight_seed = match config.target {
        TargetSpec::Multimodal1d { weight_seed } => weight_seed,
        _ => DEFAULT_WEIGHT_SEED,
    };
    json!({
        "smoothing_alpha": DEFAULT_SMOOTHING,
        "q_floor": PROB_FLOOR,
        "target_weight_seed": weight_seed,
        "brickwork_pairing": BRICKWORK_PAIRING,
        "bit_order": "qubit 0 is the least significant bit; ancillas are the highest-index qubits",
        "rotation_convention": "R_a(theta) = exp(-i theta sigma_a / 2)",
        "parameter_init": "uniform(-pi, pi); J_xx initialised to 1",
        "initial_coupling": INITIAL_COUPLING,
        "empirical_kld": "D(target || smoothed shot histogram)",
        "loss": "exact NLL of the model distribution",
        "adam": { "beta1": 0.9, "beta2": 0.999, "epsilon": 1e-8, "learning_rate": config.train.learning_rate, "clip_norm": config.train.clip_norm },
        "std": "population (ddof = 0)",
        "seed_derivation": "realization r uses ChaCha20 substream_index(r) of root_seed with named substreams scrambler, init, shots; identical across sweep points",
        "rbm": "CD-1 with p(h|v) statistics, one minibatch per epoch drawn from the exact target, weights N(0, init_std^2), zero biases",
        "grid_2d": "bin centres on [-3, 3]; joint index = x | (y << n_x)",
    })
}

fn manifest(config: &ExperimentConfig, points: &[SweepPoint], status: &str) -> Result<serde_json::Value> {
    let point_table: Vec<_> = points
        .iter()
        .map(|p| {
            json!({
                "point": p.index,
                "model": p.model_name(),
                "scrambler_type": p.scrambler_type(),
                "hamiltonian_preset": p.hamiltonian_preset(),
                "N": p.num_qubits(),
                "N_A": p.num_ancillas(),
                "L": p.num_layers(),
                "K": p.depth(),
                "tau": p.tau(),
                "rho": p.rho,
                "num_hidden": p.num_hidden(),
                "num_params": p.num_params(),
                "spec": p.model,
            })
        })
        .collect();
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "crate_version": env!("CARGO_PKG_VERSION"),
        "experiment_id": config.name,
        "kind": config.kind.name(),
        "paper_scale": config.paper_scale,
        "status": status,
        "root_seed": config.train.root_seed,
        "realizations": (0..config.train.num_realizations as u64).collect::<Vec<_>>(),
        "config": serde_json::to_value(config)?,
        "decisions": decision_stamps(config),
        "points": point_table,
        "files": [RESULTS_FILE, SUMMARY_FILE, DISTRIBUTIONS_FILE, TIMINGS_FILE],
    }))
}

fn ensure_header(path: &Path, header: &[&str]) -> Result<()> {
    if !path.exists() {
        write_csv_atomic::<()>(path, &[], header)?;
    }
    Ok(())
}

struct Sinks {
    results: csv::Writer<std::fs::File>,
    distributions: csv::Writer<std::fs::File>,
    timings: csv::Writer<std::fs::File>,
}

fn appender(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    let file = OpenOptions::new().append(true).open(path)?;
    Ok(csv::WriterBuilder::new().has_headers(false).from_writer(file))
}

/// Runs (or resumes) the sweep described by `config`.
///
/// Rows are appended as jobs finish; at the end every file is rewritten in
/// (point, seed, epoch) order, so the final bytes do not depend on the
/// number of workers.
pub fn run_experiment(config: &ExperimentConfig, options: &RunOptions) -> Result<RunReport> {
    config.validate().map_err(|(key, message)| Error::InvalidArgument(format!("{key}: {message}")))?;
    let points = expand(config)?;
    let seeds = config.train.num_realizations as u64;
    let out_dir = config.resolve_output_dir(options.out_dir.as_deref());
    let table = super::sweep::describe(&points, config.train.num_realizations);
    let mut report = RunReport {
        out_dir: out_dir.clone(),
        jobs_total: points.len() * seeds as usize,
        points: points.clone(),
        jobs_run: 0,
        table,
        summary: Vec::new(),
    };
    if options.dry_run {
        return Ok(report);
    }
    if config.paper_scale {
        log::warn!("{}: full-scale settings; expect a run of many hours", config.name);
    }

    let results_path = out_dir.join(RESULTS_FILE);
    let dist_path = out_dir.join(DISTRIBUTIONS_FILE);
    let timings_path = out_dir.join(TIMINGS_FILE);
    let manifest_path = out_dir.join(MANIFEST_FILE);
    let existing = [&results_path, &manifest_path].iter().any(|p| p.exists());
    if existing && !options.resume {
        return Err(Error::PartialOutput(out_dir));
    }
    std::fs::create_dir_all(&out_dir)?;

    let (mut kept_rows, mut kept_dists, mut kept_timings) = (Vec::new(), Vec::new(), Vec::new());
    let mut done: BTreeSet<(usize, u64)> = BTreeSet::new();
    if existing {
        if manifest_path.exists() {
            let old: serde_json::Value = serde_json::from_reader(std::fs::File::open(&manifest_path)?)?;
            let found = old.get("schema_version").and_then(|v| v.as_str()).unwrap_or("<missing>");
            if found != SCHEMA_VERSION {
                return Err(Error::Schema { path: manifest_path, expected: SCHEMA_VERSION.into(), found: found.into() });
            }
            let old_config: ExperimentConfig = serde_json::from_value(old["config"].clone())?;
            if old_config != *config {
                return Err(Error::InvalidArgument(format!(
                    "{} was produced by a different config; refusing to resume",
                    out_dir.display()
                )));
            }
        }
        let rows = if results_path.exists() { read_results(&results_path)? } else { Vec::new() };
        let dists: Vec<DistributionRow> = if dist_path.exists() { read_csv(&dist_path)? } else { Vec::new() };
        let timings: Vec<TimingRow> = if timings_path.exists() { read_csv(&timings_path)? } else { Vec::new() };
        for p in &points {
            let epochs = expected_epochs(config, p);
            let bins = 1usize << p.target_bits();
            for s in 0..seeds {
                let got: Vec<usize> = rows.iter().filter(|r| r.point == p.index && r.seed == s).map(|r| r.epoch).collect();
                let nd = dists.iter().filter(|d| d.point == p.index && d.seed == s).count();
                let mut sorted = got.clone();
                sorted.sort_unstable();
                if sorted == epochs && nd == bins {
                    done.insert((p.index, s));
                }
            }
        }
        kept_rows = rows.into_iter().filter(|r| done.contains(&(r.point, r.seed))).collect();
        kept_dists = dists.into_iter().filter(|d| done.contains(&(d.point, d.seed))).collect();
        kept_timings = timings.into_iter().filter(|t| done.contains(&(t.point, t.seed))).collect();
        log::info!("resuming: {} of {} jobs already complete", done.len(), report.jobs_total);
    }

    write_json_atomic(&manifest_path, &manifest(config, &points, "running")?)?;
    write_csv_atomic(&results_path, &kept_rows, &RESULT_COLUMNS)?;
    write_csv_atomic(&dist_path, &kept_dists, &DISTRIBUTION_COLUMNS)?;
    write_csv_atomic(&timings_path, &kept_timings, &TIMING_COLUMNS)?;
    for (p, h) in [(&results_path, &RESULT_COLUMNS[..]), (&dist_path, &DISTRIBUTION_COLUMNS), (&timings_path, &TIMING_COLUMNS)] {
        ensure_header(p, h)?;
    }

    let targets: Vec<TargetDistribution> = points.iter().map(|p| point_target(config, p)).collect::<Result<_>>()?;
    let jobs: Vec<(usize, u64)> = points
        .iter()
        .flat_map(|p| (0..seeds).map(move |s| (p.index, s)))
        .filter(|j| !done.contains(j))
        .collect();
    report.jobs_run = jobs.len();
    let sinks = Mutex::new(Sinks {
        results: appender(&results_path)?,
        distributions: appender(&dist_path)?,
        timings: appender(&timings_path)?,
    });
    crate::training::run_parallel(jobs.len(), options.workers, |j| {
        let (pi, seed) = jobs[j];
        let (point, target) = (&points[pi], &targets[pi]);
        let (record, q) = run_job(config, point, target, seed)?;
        let mut sinks = sinks.lock().expect("writer lock poisoned");
        for row in ResultRow::from_record(&config.name, point, &record) {
            sinks.results.serialize(row)?;
        }
        for (bin, (&t, &m)) in target.probs.iter().zip(&q).enumerate() {
            sinks.distributions.serialize(DistributionRow { point: pi, seed, bin, target: t, model: m })?;
        }
        sinks.timings.serialize(TimingRow { point: pi, seed, wall_seconds: record.wall_seconds })?;
        sinks.results.flush()?;
        sinks.distributions.flush()?;
        sinks.timings.flush()?;
        log::info!("point {pi} seed {seed}: final exact KLD {:.4e}", record.final_eval().exact_kld);
        Ok(())
    })?;
    drop(sinks);

    let mut rows = read_results(&results_path)?;
    rows.sort_by_key(|r| (r.point, r.seed, r.epoch));
    write_csv_atomic(&results_path, &rows, &RESULT_COLUMNS)?;
    let mut dists: Vec<DistributionRow> = read_csv(&dist_path)?;
    dists.sort_by_key(|r| (r.point, r.seed, r.bin));
    write_csv_atomic(&dist_path, &dists, &DISTRIBUTION_COLUMNS)?;
    let mut timings: Vec<TimingRow> = read_csv(&timings_path)?;
    timings.sort_by_key(|r| (r.point, r.seed));
    write_csv_atomic(&timings_path, &timings, &TIMING_COLUMNS)?;

    report.summary = summarize(&out_dir)?;
    write_json_atomic(&manifest_path, &manifest(config, &points, "complete")?)?;
    Ok(report)
}

/// Final distributions of every realization at `point`, in seed order.
pub fn read_final_distributions(dir: &Path, point: usize) -> Result<Vec<(u64, Vec<f64>)>> {
    let rows: Vec<DistributionRow> = read_csv(&dir.join(DISTRIBUTIONS_FILE))?;
    let mut out: Vec<(u64, Vec<f64>)> = Vec::new();
    for r in rows.into_iter().filter(|r| r.point == point) {
        match out.last_mut() {
            Some((s, v)) if *s == r.seed => v.push(r.model),
            _ => out.push((r.seed, vec![r.model])),
        }
    }
    Ok(out)
}
