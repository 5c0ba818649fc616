//! CSV result files and their summaries.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::sweep::SweepPoint;
use crate::error::{Error, Result};
use crate::training::{mean_std, TrainingRecord};

/// Version stamped into every results row and the manifest.
pub const SCHEMA_VERSION: &str = "qsbm-results/1";

pub const RESULTS_FILE: &str = "results.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const TIMINGS_FILE: &str = "timings.csv";
pub const DISTRIBUTIONS_FILE: &str = "final_distributions.csv";

/// One evaluation of one realization at one sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment_id: String,
    pub point: usize,
    pub model: String,
    pub scrambler_type: String,
    pub hamiltonian_preset: String,
    #[serde(rename = "N")]
    pub num_qubits: usize,
    #[serde(rename = "N_A")]
    pub num_ancillas: Option<usize>,
    #[serde(rename = "L")]
    pub num_layers: Option<usize>,
    #[serde(rename = "K")]
    pub depth: Option<usize>,
    pub tau: Option<f64>,
    pub rho: Option<f64>,
    pub num_hidden: Option<usize>,
    pub num_params: usize,
    pub seed: u64,
    pub epoch: usize,
    pub nll: f64,
    pub kld_exact: f64,
    pub kld_empirical: f64,
    pub half_chain_entropy: Option<f64>,
    pub schema_version: String,
}

pub const RESULT_COLUMNS: [&str; 20] = [
    "experiment_id",
    "point",
    "model",
    "scrambler_type",
    "hamiltonian_preset",
    "N",
    "N_A",
    "L",
    "K",
    "tau",
    "rho",
    "num_hidden",
    "num_params",
    "seed",
    "epoch",
    "nll",
    "kld_exact",
    "kld_empirical",
    "half_chain_entropy",
    "schema_version",
];

impl ResultRow {
    pub fn from_record(experiment_id: &str, point: &SweepPoint, record: &TrainingRecord) -> Vec<Self> {
        record
            .evals
            .iter()
            .map(|e| ResultRow {
                experiment_id: experiment_id.to_string(),
                point: point.index,
                model: point.model_name().into(),
                scrambler_type: point.scrambler_type().into(),
                hamiltonian_preset: point.hamiltonian_preset().into(),
                num_qubits: point.num_qubits(),
                num_ancillas: point.num_ancillas(),
                num_layers: point.num_layers(),
                depth: point.depth(),
                tau: point.tau(),
                rho: point.rho,
                num_hidden: point.num_hidden(),
                num_params: point.num_params(),
                seed: record.seed,
                epoch: e.epoch,
                nll: e.nll,
                kld_exact: e.exact_kld,
                kld_empirical: e.empirical_kld,
                half_chain_entropy: e.half_chain_entropy,
                schema_version: SCHEMA_VERSION.into(),
            })
            .collect()
    }
}

/// Final learned distribution of one realization, one row per bin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub point: usize,
    pub seed: u64,
    pub bin: usize,
    pub target: f64,
    pub model: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub point: usize,
    pub seed: u64,
    pub wall_seconds: f64,
}

/// Mean ± std (population) of final-epoch metrics for one sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub experiment_id: String,
    pub model: String,
    pub scrambler_type: String,
    pub hamiltonian_preset: String,
    #[serde(rename = "N")]
    pub num_qubits: usize,
    #[serde(rename = "N_A")]
    pub num_ancillas: Option<usize>,
    #[serde(rename = "L")]
    pub num_layers: Option<usize>,
    #[serde(rename = "K")]
    pub depth: Option<usize>,
    pub tau: Option<f64>,
    pub rho: Option<f64>,
    pub num_hidden: Option<usize>,
    pub num_params: usize,
    pub point: usize,
    pub num_seeds: usize,
    pub final_epoch: usize,
    pub kld_exact_mean: f64,
    pub kld_exact_std: f64,
    pub kld_exact_median: f64,
    /// Mean over seeds of the smallest exact KLD among evaluation epochs.
    pub kld_exact_best_mean: f64,
    pub kld_empirical_mean: f64,
    pub kld_empirical_std: f64,
    pub nll_mean: f64,
    pub half_chain_entropy_mean: Option<f64>,
    pub schema_version: String,
}

fn cmp_opt<T: PartialOrd>(a: &Option<T>, b: &Option<T>) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (Some(x), Some(y)) => x.partial_cmp(y).unwrap_or(Ordering::Equal),
    }
}

impl SummaryRow {
    /// Lexicographic order on the sweep axes.
    pub fn axis_cmp(&self, other: &Self) -> Ordering {
        self.model
            .cmp(&other.model)
            .then_with(|| self.scrambler_type.cmp(&other.scrambler_type))
            .then_with(|| self.hamiltonian_preset.cmp(&other.hamiltonian_preset))
            .then_with(|| self.num_qubits.cmp(&other.num_qubits))
            .then_with(|| cmp_opt(&self.num_ancillas, &other.num_ancillas))
            .then_with(|| cmp_opt(&self.num_layers, &other.num_layers))
            .then_with(|| cmp_opt(&self.depth, &other.depth))
            .then_with(|| cmp_opt(&self.tau, &other.tau))
            .then_with(|| cmp_opt(&self.rho, &other.rho))
            .then_with(|| cmp_opt(&self.num_hidden, &other.num_hidden))
            .then_with(|| self.point.cmp(&other.point))
    }
}

pub(crate) fn check_header(path: &Path, reader: &mut csv::Reader<File>, expected: &[&str]) -> Result<()> {
    let found: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if found != expected {
        return Err(Error::Schema {
            path: path.to_path_buf(),
            expected: format!("{SCHEMA_VERSION} columns [{}]", expected.join(",")),
            found: format!("[{}]", found.join(",")),
        });
    }
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    check_header(path, &mut reader, &RESULT_COLUMNS)?;
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        let row: ResultRow = row?;
        if row.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema {
                path: path.to_path_buf(),
                expected: SCHEMA_VERSION.into(),
                found: row.schema_version,
            });
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut reader = csv::Reader::from_path(path)?;
    reader.deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Writes `rows` to `path` through a temporary file and an atomic rename.
pub fn write_csv_atomic<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let tmp = path.with_extension("csv.tmp");
    {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_path(&tmp)?;
        w.write_record(header)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json_atomic(path: &Path, value: &serde_json::Value) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    {
        let mut f = File::create(&tmp)?;
        serde_json::to_writer_pretty(&mut f, value)?;
        f.write_all(b"\n")?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub const DISTRIBUTION_COLUMNS: [&str; 5] = ["point", "seed", "bin", "target", "model"];
pub const TIMING_COLUMNS: [&str; 3] = ["point", "seed", "wall_seconds"];
pub const SUMMARY_COLUMNS: [&str; 24] = [
    "experiment_id",
    "model",
    "scrambler_type",
    "hamiltonian_preset",
    "N",
    "N_A",
    "L",
    "K",
    "tau",
    "rho",
    "num_hidden",
    "num_params",
    "point",
    "num_seeds",
    "final_epoch",
    "kld_exact_mean",
    "kld_exact_std",
    "kld_exact_median",
    "kld_exact_best_mean",
    "kld_empirical_mean",
    "kld_empirical_std",
    "nll_mean",
    "half_chain_entropy_mean",
    "schema_version",
];

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    match v.len() {
        0 => f64::NAN,
        n if n % 2 == 1 => v[n / 2],
        n => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

/// Per-point summaries of `rows`, ordered by [`SummaryRow::axis_cmp`].
/// The result does not depend on the order of `rows`.
pub fn summarize_rows(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut by_point: BTreeMap<usize, BTreeMap<u64, Vec<&ResultRow>>> = BTreeMap::new();
    for r in rows {
        by_point.entry(r.point).or_default().entry(r.seed).or_default().push(r);
    }
    let mut out: Vec<SummaryRow> = by_point
        .into_values()
        .map(|seeds| {
            let finals: Vec<&ResultRow> = seeds
                .values()
                .map(|rs| *rs.iter().max_by_key(|r| r.epoch).expect("non-empty group"))
                .collect();
            let best: Vec<f64> = seeds
                .values()
                .map(|rs| rs.iter().map(|r| r.kld_exact).fold(f64::INFINITY, f64::min))
                .collect();
            let col = |f: fn(&ResultRow) -> f64| finals.iter().map(|r| f(r)).collect::<Vec<f64>>();
            let exact = col(|r| r.kld_exact);
            let (kld_exact_mean, kld_exact_std) = mean_std(&exact);
            let (kld_empirical_mean, kld_empirical_std) = mean_std(&col(|r| r.kld_empirical));
            let entropy: Option<Vec<f64>> = finals.iter().map(|r| r.half_chain_entropy).collect();
            let f = finals[0];
            SummaryRow {
                experiment_id: f.experiment_id.clone(),
                model: f.model.clone(),
                scrambler_type: f.scrambler_type.clone(),
                hamiltonian_preset: f.hamiltonian_preset.clone(),
                num_qubits: f.num_qubits,
                num_ancillas: f.num_ancillas,
                num_layers: f.num_layers,
                depth: f.depth,
                tau: f.tau,
                rho: f.rho,
                num_hidden: f.num_hidden,
                num_params: f.num_params,
                point: f.point,
                num_seeds: finals.len(),
                final_epoch: finals.iter().map(|r| r.epoch).min().unwrap_or(0),
                kld_exact_mean,
                kld_exact_std,
                kld_exact_median: median(&exact),
                kld_exact_best_mean: mean_std(&best).0,
                kld_empirical_mean,
                kld_empirical_std,
                nll_mean: mean_std(&col(|r| r.nll)).0,
                half_chain_entropy_mean: entropy.map(|e| mean_std(&e).0),
                schema_version: SCHEMA_VERSION.into(),
            }
        })
        .collect();
    out.sort_by(SummaryRow::axis_cmp);
    out
}

/// Reads `results.csv` in `dir`, writes `summary.csv` next to it and
/// returns the summary rows.
pub fn summarize(dir: &Path) -> Result<Vec<SummaryRow>> {
    let manifest_path = dir.join(MANIFEST_FILE);
    if manifest_path.exists() {
        let manifest: serde_json::Value = serde_json::from_reader(File::open(&manifest_path)?)?;
        let found = manifest.get("schema_version").and_then(|v| v.as_str()).unwrap_or("<missing>");
        if found != SCHEMA_VERSION {
            return Err(Error::Schema { path: manifest_path, expected: SCHEMA_VERSION.into(), found: found.into() });
        }
    }
    let rows = read_results(&dir.join(RESULTS_FILE))?;
    let summary = summarize_rows(&rows);
    write_csv_atomic(&dir.join(SUMMARY_FILE), &summary, &SUMMARY_COLUMNS)?;
    Ok(summary)
}

/// Reads `summary.csv` written by [`summarize`].
pub fn read_summary(dir: &Path) -> Result<Vec<SummaryRow>> {
    let path: PathBuf = dir.join(SUMMARY_FILE);
    let mut reader = csv::Reader::from_path(&path)?;
    check_header(&path, &mut reader, &SUMMARY_COLUMNS)?;
    reader.deserialize().map(|r| r.map_err(Error::from)).collect()
}
