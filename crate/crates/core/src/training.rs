//! Adam training loop and multi-realization runs.
//!
//! The loss is always the exact NLL of the model distribution. Shots are
//! drawn only at evaluation epochs to report an empirical KLD.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::born::{loss_and_gradient, output_distribution, ModelSpec, ParameterSet};
use crate::error::{Error, Result};
use crate::metrics::{empirical_distribution, kld, shannon_entropy, DEFAULT_SMOOTHING};
use crate::rng::RandomStream;
use crate::scramblers::{compile_scrambler, CompiledScrambler};
use crate::statevector::sample_counts;

/// Adam moments with gradient-norm clipping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub clip_norm: f64,
}

impl AdamState {
    pub fn new(num_params: usize, learning_rate: f64, clip_norm: f64) -> Self {
        Self {
            m: vec![0.0; num_params],
            v: vec![0.0; num_params],
            t: 0,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            clip_norm,
        }
    }

    /// One bias-corrected Adam update. The gradient is first rescaled so its
    /// Euclidean norm does not exceed `clip_norm`.
    pub fn step(&mut self, params: &mut [f64], gradient: &[f64]) -> Result<()> {
        if params.len() != self.m.len() || gradient.len() != self.m.len() {
            return Err(Error::DimensionMismatch {
                expected: self.m.len(),
                got: if params.len() != self.m.len() { params.len() } else { gradient.len() },
            });
        }
        if let Some(index) = gradient.iter().position(|g| !g.is_finite()) {
            return Err(Error::NonFiniteGradient { epoch: self.t as usize, index });
        }
        let norm = gradient.iter().map(|g| g * g).sum::<f64>().sqrt();
        let scale = if norm > self.clip_norm { self.clip_norm / norm } else { 1.0 };
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..params.len() {
            let g = gradient[i] * scale;
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
        }
        Ok(())
    }
}

/// Clipped copy of `gradient`, as used inside [`AdamState::step`].
pub fn clip_gradient(gradient: &[f64], clip_norm: f64) -> Vec<f64> {
    let norm = gradient.iter().map(|g| g * g).sum::<f64>().sqrt();
    let scale = if norm > clip_norm { clip_norm / norm } else { 1.0 };
    gradient.iter().map(|g| g * scale).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub num_realizations: usize,
    pub num_shots: u64,
    pub learning_rate: f64,
    pub clip_norm: f64,
    pub eval_every: usize,
    pub root_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 2000,
            num_realizations: 20,
            num_shots: 5000,
            learning_rate: 0.01,
            clip_norm: 1.0,
            eval_every: 50,
            root_seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.num_realizations == 0 || self.num_shots == 0 || self.eval_every == 0 {
            return bad("num_realizations, num_shots and eval_every must be positive".into());
        }
        if self.epochs % self.eval_every != 0 {
            return bad(format!("eval_every {} does not divide epochs {}", self.eval_every, self.epochs));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return bad(format!("learning rate {} must be finite and ≥ 0", self.learning_rate));
        }
        if !(self.clip_norm > 0.0) {
            return bad(format!("clip_norm {} must be positive", self.clip_norm));
        }
        Ok(())
    }

    /// Epochs at which metrics are recorded: `0, eval_every, …, epochs`.
    pub fn eval_epochs(&self) -> impl Iterator<Item = usize> + '_ {
        (0..=self.epochs).step_by(self.eval_every.max(1))
    }
}

/// Metrics at one evaluation epoch (after `epoch` optimizer steps).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint {
    pub epoch: usize,
    pub nll: f64,
    pub exact_kld: f64,
    pub empirical_kld: f64,
    /// Half-chain entropy of the circuit output state; absent for classical models.
    pub half_chain_entropy: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingRecord {
    /// Realization index within the root seed.
    pub seed: u64,
    pub evals: Vec<EvalPoint>,
    pub final_params: Vec<f64>,
    /// Smallest exact KLD seen at any epoch.
    pub best_exact_kld: f64,
    pub wall_seconds: f64,
}

impl TrainingRecord {
    pub fn final_eval(&self) -> &EvalPoint {
        self.evals.last().expect("records always hold the epoch-0 evaluation")
    }

    /// Same record with timing removed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        Self { wall_seconds: 0.0, ..self.clone() }
    }
}

/// Exact KLD plus a shot-based KLD from a fresh draw.
pub(crate) fn evaluate_distribution(
    target: &[f64],
    model: &[f64],
    num_shots: u64,
    shots: &mut RandomStream,
) -> Result<(f64, f64)> {
    let exact = kld(target, model)?;
    let counts = sample_counts(model, num_shots, shots)?;
    let empirical = kld(target, &empirical_distribution(&counts, DEFAULT_SMOOTHING)?)?;
    Ok((exact, empirical))
}

/// Trains one realization from explicit initial parameters.
///
/// `shots` supplies the shot draws at evaluation epochs.
pub fn train_from(
    model: &ModelSpec,
    scrambler: Option<&CompiledScrambler>,
    target: &[f64],
    config: &TrainConfig,
    mut params: ParameterSet,
    shots: &mut RandomStream,
) -> Result<TrainingRecord> {
    config.validate()?;
    let start = Instant::now();
    let entropy = shannon_entropy(target);
    let mut adam = AdamState::new(model.num_params(), config.learning_rate, config.clip_norm);
    let mut evals = Vec::with_capacity(config.epochs / config.eval_every + 1);
    let mut best = f64::INFINITY;
    for epoch in 0..=config.epochs {
        let (loss, grad) = loss_and_gradient(model, &params, scrambler, target)?;
        if !loss.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite loss at epoch {epoch}")));
        }
        best = best.min(loss - entropy);
        if epoch % config.eval_every == 0 {
            let state = crate::born::forward(model, &params, scrambler)?;
            let q = state.marginal_probabilities(&model.ancilla_qubits())?;
            let (exact_kld, empirical_kld) = evaluate_distribution(target, &q, config.num_shots, shots)?;
            evals.push(EvalPoint {
                epoch,
                nll: loss,
                exact_kld,
                empirical_kld,
                half_chain_entropy: Some(state.half_chain_entropy()?),
            });
        }
        if epoch < config.epochs {
            adam.step(&mut params, &grad).map_err(|e| match e {
                Error::NonFiniteGradient { index, .. } => Error::NonFiniteGradient { epoch, index },
                e => e,
            })?;
        }
    }
    Ok(TrainingRecord {
        seed: 0,
        evals,
        final_params: params.0,
        best_exact_kld: best.max(0.0),
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Trains realization `realization` of `config.root_seed`.
///
/// The realization stream is `root.substream_index(realization)`; its
/// `"scrambler"`, `"init"` and `"shots"` substreams drive the scrambler draw,
/// the initial parameters and the shot sampling.
pub fn train_realization(
    model: &ModelSpec,
    target: &[f64],
    config: &TrainConfig,
    realization: u64,
) -> Result<TrainingRecord> {
    let stream = RandomStream::new(config.root_seed).substream_index(realization);
    let scrambler = match &model.ansatz {
        crate::born::Ansatz::FixedScrambler { scrambler } => {
            Some(compile_scrambler(scrambler, model.num_qubits, &mut stream.substream("scrambler"))?)
        }
        crate::born::Ansatz::TrainableHamiltonian { .. } => None,
    };
    train(model, scrambler.as_ref(), target, config, &stream, realization)
}

/// Trains from parameters drawn on `stream.substream("init")`.
pub fn train(
    model: &ModelSpec,
    scrambler: Option<&CompiledScrambler>,
    target: &[f64],
    config: &TrainConfig,
    stream: &RandomStream,
    realization: u64,
) -> Result<TrainingRecord> {
    if target.len() != model.num_bins() {
        return Err(Error::DimensionMismatch { expected: model.num_bins(), got: target.len() });
    }
    let params = model.init_params(&mut stream.substream("init"));
    let mut record = train_from(model, scrambler, target, config, params, &mut stream.substream("shots"))?;
    record.seed = realization;
    Ok(record)
}

/// Population mean and standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregatePoint {
    pub epoch: usize,
    pub mean_nll: f64,
    pub std_nll: f64,
    pub mean_exact_kld: f64,
    pub std_exact_kld: f64,
    pub mean_empirical_kld: f64,
    pub std_empirical_kld: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizationSet {
    pub records: Vec<TrainingRecord>,
    pub aggregate: Vec<AggregatePoint>,
}

impl RealizationSet {
    /// Aggregates records in realization order. Records must share eval epochs.
    pub fn from_records(mut records: Vec<TrainingRecord>) -> Result<Self> {
        records.sort_by_key(|r| r.seed);
        let Some(first) = records.first() else {
            return Err(Error::InvalidArgument("no realizations to aggregate".into()));
        };
        let epochs: Vec<usize> = first.evals.iter().map(|e| e.epoch).collect();
        if records.iter().any(|r| r.evals.iter().map(|e| e.epoch).ne(epochs.iter().copied())) {
            return Err(Error::InvalidArgument("realizations disagree on eval epochs".into()));
        }
        let aggregate = epochs
            .iter()
            .enumerate()
            .map(|(i, &epoch)| {
                let column = |f: fn(&EvalPoint) -> f64| {
                    mean_std(&records.iter().map(|r| f(&r.evals[i])).collect::<Vec<_>>())
                };
                let (mean_nll, std_nll) = column(|e| e.nll);
                let (mean_exact_kld, std_exact_kld) = column(|e| e.exact_kld);
                let (mean_empirical_kld, std_empirical_kld) = column(|e| e.empirical_kld);
                AggregatePoint {
                    epoch,
                    mean_nll,
                    std_nll,
                    mean_exact_kld,
                    std_exact_kld,
                    mean_empirical_kld,
                    std_empirical_kld,
                }
            })
            .collect();
        Ok(Self { records, aggregate })
    }

    pub fn final_exact_klds(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.final_eval().exact_kld).collect()
    }

    pub fn final_aggregate(&self) -> &AggregatePoint {
        self.aggregate.last().expect("aggregate is never empty")
    }
}

/// Runs `config.num_realizations` realizations on up to `workers` threads
/// (all available cores when `None`). Output does not depend on `workers`.
pub fn run_realizations(
    model: &ModelSpec,
    target: &[f64],
    config: &TrainConfig,
    workers: Option<usize>,
) -> Result<RealizationSet> {
    config.validate()?;
    let job = |r: usize| train_realization(model, target, config, r as u64);
    let records = run_parallel(config.num_realizations, workers, job)?;
    RealizationSet::from_records(records)
}

/// Runs `count` indexed jobs on a bounded pool and returns results in index order.
pub fn run_parallel<T, F>(count: usize, workers: Option<usize>, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
{
    use rayon::prelude::*;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder.build().map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| (0..count).into_par_iter().map(&job).collect())
}

/// Model distribution at the record's final parameters.
pub fn final_distribution(
    model: &ModelSpec,
    record: &TrainingRecord,
    root_seed: u64,
) -> Result<Vec<f64>> {
    let stream = RandomStream::new(root_seed).substream_index(record.seed);
    let scrambler = match &model.ansatz {
        crate::born::Ansatz::FixedScrambler { scrambler } => {
            Some(compile_scrambler(scrambler, model.num_qubits, &mut stream.substream("scrambler"))?)
        }
        crate::born::Ansatz::TrainableHamiltonian { .. } => None,
    };
    output_distribution(model, &record.final_params, scrambler.as_ref())
}
