//! Binary restricted Boltzmann machine trained with CD-1.
//!
//! Visible unit `i` is bit `i` of the bin index, so the RBM models the same
//! joint index layout as the quantum model. With at most a few hundred
//! parameters and `n_v ≤ 16`, the exact distribution is computed from the
//! free energy by enumerating all visible states.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{kld, shannon_entropy};
use crate::rng::RandomStream;
use crate::training::{evaluate_distribution, run_parallel, EvalPoint, RealizationSet, TrainingRecord};

/// Largest visible layer for which the exact distribution is enumerated.
pub const MAX_VISIBLE: usize = 16;

/// Hidden units of the footnoted geometry.
pub const FOOTNOTE_HIDDEN: usize = 102;

/// Parameter budget matched against the quantum model.
pub const PARAMETER_BUDGET: usize = 310;

/// Largest `n_h` with `n_v·n_h + n_v + n_h ≤ budget`.
pub fn matched_hidden_units(num_visible: usize, budget: usize) -> usize {
    budget.saturating_sub(num_visible) / (num_visible + 1)
}

pub fn parameter_count(num_visible: usize, num_hidden: usize) -> usize {
    num_visible * num_hidden + num_visible + num_hidden
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RbmParams {
    pub num_visible: usize,
    pub num_hidden: usize,
    /// Row-major `n_v × n_h`.
    pub weights: Vec<f64>,
    pub visible_bias: Vec<f64>,
    pub hidden_bias: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn bit(v: usize, i: usize) -> f64 {
    ((v >> i) & 1) as f64
}

impl RbmParams {
    pub fn zeros(num_visible: usize, num_hidden: usize) -> Result<Self> {
        if num_visible == 0 || num_visible > MAX_VISIBLE {
            return Err(Error::Capacity { what: "visible units", got: num_visible, limit: MAX_VISIBLE });
        }
        if num_hidden == 0 {
            return Err(Error::InvalidArgument("RBM needs at least one hidden unit".into()));
        }
        Ok(Self {
            num_visible,
            num_hidden,
            weights: vec![0.0; num_visible * num_hidden],
            visible_bias: vec![0.0; num_visible],
            hidden_bias: vec![0.0; num_hidden],
        })
    }

    /// Zero biases and weights drawn from `N(0, init_std²)`.
    pub fn random(num_visible: usize, num_hidden: usize, init_std: f64, rng: &mut RandomStream) -> Result<Self> {
        let mut p = Self::zeros(num_visible, num_hidden)?;
        if init_std > 0.0 {
            let normal = Normal::new(0.0, init_std)
                .map_err(|e| Error::InvalidArgument(format!("init std {init_std}: {e}")))?;
            for w in &mut p.weights {
                *w = normal.sample(rng);
            }
        }
        Ok(p)
    }

    pub fn num_params(&self) -> usize {
        parameter_count(self.num_visible, self.num_hidden)
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.num_hidden + j]
    }

    /// Hidden pre-activations `b_h + Wᵀv` for visible state `v` (bin index).
    fn hidden_field(&self, v: &[f64]) -> Vec<f64> {
        let mut out = self.hidden_bias.clone();
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0.0 {
                let row = &self.weights[i * self.num_hidden..(i + 1) * self.num_hidden];
                for (o, w) in out.iter_mut().zip(row) {
                    *o += vi * w;
                }
            }
        }
        out
    }

    fn visible_field(&self, h: &[f64]) -> Vec<f64> {
        (0..self.num_visible)
            .map(|i| {
                let row = &self.weights[i * self.num_hidden..(i + 1) * self.num_hidden];
                self.visible_bias[i] + row.iter().zip(h).map(|(w, hj)| w * hj).sum::<f64>()
            })
            .collect()
    }

    fn unpack(&self, v: usize) -> Vec<f64> {
        (0..self.num_visible).map(|i| bit(v, i)).collect()
    }

    /// `F(v) = −b_v·v − Σ_j softplus(b_h_j + (Wᵀv)_j)` for the visible state
    /// whose bits are those of `v`.
    pub fn free_energy(&self, v: usize) -> f64 {
        let bits = self.unpack(v);
        let linear: f64 = bits.iter().zip(&self.visible_bias).map(|(x, b)| x * b).sum();
        -linear - self.hidden_field(&bits).into_iter().map(softplus).sum::<f64>()
    }

    /// `p(v) = e^{−F(v)} / Σ_v' e^{−F(v')}` over all `2^{n_v}` states.
    pub fn exact_distribution(&self) -> Vec<f64> {
        let neg_f: Vec<f64> = (0..1usize << self.num_visible).map(|v| -self.free_energy(v)).collect();
        let max = neg_f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let unnorm: Vec<f64> = neg_f.iter().map(|x| (x - max).exp()).collect();
        let z: f64 = unnorm.iter().sum();
        unnorm.into_iter().map(|x| x / z).collect()
    }

    /// One CD-1 step on `batch` (bin indices) followed by a plain SGD update.
    ///
    /// The positive phase uses `p(h|v)`; the reconstruction samples `h` and
    /// `v'` and the negative phase uses `p(h'|v')`.
    pub fn cd1_update(&mut self, batch: &[usize], learning_rate: f64, rng: &mut RandomStream) -> Result<()> {
        if batch.is_empty() {
            return Err(Error::InvalidArgument("empty minibatch".into()));
        }
        if let Some(&v) = batch.iter().find(|&&v| v >> self.num_visible != 0) {
            return Err(Error::InvalidArgument(format!("visible state {v} exceeds {} bits", self.num_visible)));
        }
        let (nv, nh) = (self.num_visible, self.num_hidden);
        let mut dw = vec![0.0; nv * nh];
        let mut dbv = vec![0.0; nv];
        let mut dbh = vec![0.0; nh];
        for &sample in batch {
            let v0 = self.unpack(sample);
            let ph0: Vec<f64> = self.hidden_field(&v0).into_iter().map(sigmoid).collect();
            let h0: Vec<f64> = ph0.iter().map(|&p| f64::from(u8::from(rng.random::<f64>() < p))).collect();
            let v1: Vec<f64> = self
                .visible_field(&h0)
                .into_iter()
                .map(|a| f64::from(u8::from(rng.random::<f64>() < sigmoid(a))))
                .collect();
            let ph1: Vec<f64> = self.hidden_field(&v1).into_iter().map(sigmoid).collect();
            for i in 0..nv {
                dbv[i] += v0[i] - v1[i];
                let row = &mut dw[i * nh..(i + 1) * nh];
                for j in 0..nh {
                    row[j] += v0[i] * ph0[j] - v1[i] * ph1[j];
                }
            }
            for j in 0..nh {
                dbh[j] += ph0[j] - ph1[j];
            }
        }
        let step = learning_rate / batch.len() as f64;
        for (w, d) in self.weights.iter_mut().zip(&dw) {
            *w += step * d;
        }
        for (b, d) in self.visible_bias.iter_mut().zip(&dbv) {
            *b += step * d;
        }
        for (b, d) in self.hidden_bias.iter_mut().zip(&dbh) {
            *b += step * d;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RbmConfig {
    pub num_hidden: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Standard deviation of the initial weights. Zero weights never break
    /// the symmetry between hidden units, so the default is small but nonzero.
    pub init_std: f64,
    pub eval_every: usize,
    pub num_shots: u64,
}

impl Default for RbmConfig {
    fn default() -> Self {
        Self {
            num_hidden: matched_hidden_units(8, PARAMETER_BUDGET),
            epochs: 50_000,
            batch_size: 64,
            learning_rate: 0.01,
            init_std: 0.01,
            eval_every: 500,
            num_shots: 5000,
        }
    }
}

impl RbmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.eval_every == 0 || self.num_hidden == 0 || self.num_shots == 0 {
            return Err(Error::InvalidArgument(
                "batch_size, eval_every, num_hidden and num_shots must be positive".into(),
            ));
        }
        if self.epochs % self.eval_every != 0 {
            return Err(Error::InvalidArgument(format!(
                "eval_every {} does not divide epochs {}",
                self.eval_every, self.epochs
            )));
        }
        Ok(())
    }
}

fn visible_bits(target: &[f64]) -> Result<usize> {
    let n = target.len().trailing_zeros() as usize;
    if target.len() < 2 || target.len() != 1 << n {
        return Err(Error::InvalidArgument(format!("target length {} is not a power of two", target.len())));
    }
    Ok(n)
}

/// Trains an RBM on minibatches drawn exactly from `target`.
///
/// Each epoch is one CD-1 update on a fresh minibatch. `stream` supplies the
/// `"init"`, `"batches"`, `"gibbs"` and `"shots"` substreams.
pub fn train_rbm(target: &[f64], config: &RbmConfig, stream: &RandomStream, realization: u64) -> Result<TrainingRecord> {
    config.validate()?;
    let start = std::time::Instant::now();
    let num_visible = visible_bits(target)?;
    let mut params = RbmParams::random(num_visible, config.num_hidden, config.init_std, &mut stream.substream("init"))?;
    let sampler = WeightedIndex::new(target).map_err(|e| Error::InvalidArgument(format!("target: {e}")))?;
    let (mut batches, mut gibbs, mut shots) =
        (stream.substream("batches"), stream.substream("gibbs"), stream.substream("shots"));
    let entropy = shannon_entropy(target);
    let mut evals = Vec::new();
    let mut best = f64::INFINITY;
    let mut batch = vec![0usize; config.batch_size];
    for epoch in 0..=config.epochs {
        if epoch % config.eval_every == 0 {
            let q = params.exact_distribution();
            let (exact_kld, empirical_kld) = evaluate_distribution(target, &q, config.num_shots, &mut shots)?;
            best = best.min(exact_kld);
            evals.push(EvalPoint { epoch, nll: exact_kld + entropy, exact_kld, empirical_kld, half_chain_entropy: None });
        }
        if epoch < config.epochs {
            for b in &mut batch {
                *b = sampler.sample(&mut batches);
            }
            params.cd1_update(&batch, config.learning_rate, &mut gibbs)?;
        }
    }
    Ok(TrainingRecord {
        seed: realization,
        evals,
        final_params: [params.weights, params.visible_bias, params.hidden_bias].concat(),
        best_exact_kld: best,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Rebuilds parameters from a record's flattened `[W, b_v, b_h]`.
pub fn params_from_record(record: &TrainingRecord, num_visible: usize, num_hidden: usize) -> Result<RbmParams> {
    let expected = parameter_count(num_visible, num_hidden);
    if record.final_params.len() != expected {
        return Err(Error::ParameterCount { expected, got: record.final_params.len() });
    }
    let (w, rest) = record.final_params.split_at(num_visible * num_hidden);
    let (bv, bh) = rest.split_at(num_visible);
    Ok(RbmParams {
        num_visible,
        num_hidden,
        weights: w.to_vec(),
        visible_bias: bv.to_vec(),
        hidden_bias: bh.to_vec(),
    })
}

/// Realization `r` uses `RandomStream::new(root_seed).substream_index(r)`.
pub fn run_rbm_realizations(
    target: &[f64],
    config: &RbmConfig,
    root_seed: u64,
    num_realizations: usize,
    workers: Option<usize>,
) -> Result<RealizationSet> {
    let root = RandomStream::new(root_seed);
    let records = run_parallel(num_realizations, workers, |r| {
        train_rbm(target, config, &root.substream_index(r as u64), r as u64)
    })?;
    RealizationSet::from_records(records)
}

/// `D(target ‖ p_RBM)` for explicit parameters.
pub fn rbm_kld(target: &[f64], params: &RbmParams) -> Result<f64> {
    kld(target, &params.exact_distribution())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::four_mode_mixture_2d;
    use rand::Rng;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    #[test]
    fn geometry_counts() {
        assert_eq!(matched_hidden_units(8, 310), 33);
        assert_eq!(parameter_count(8, 33), 305);
        assert_eq!(matched_hidden_units(6, 310), 43);
        assert_eq!(parameter_count(6, 43), 307);
        assert_eq!(parameter_count(8, FOOTNOTE_HIDDEN), 926);
        assert_eq!(RbmParams::zeros(8, 33).unwrap().num_params(), 305);
    }

    #[test]
    fn zero_params_give_uniform() {
        let p = RbmParams::zeros(4, 3).unwrap();
        for v in 0..16 {
            assert!((p.free_energy(v) + 3.0 * LN_2).abs() < 1e-14);
        }
        for q in p.exact_distribution() {
            assert!((q - 1.0 / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn single_unit_bias_ratio() {
        let mut p = RbmParams::zeros(1, 1).unwrap();
        p.visible_bias[0] = 0.7;
        let q = p.exact_distribution();
        assert!((q[1] / q[0] - 0.7f64.exp()).abs() < 1e-12);
    }

    /// Oracle: `p(v) ∝ Σ_h exp(b_v·v + b_h·h + vᵀWh)` over all joint states.
    fn brute_force(p: &RbmParams) -> Vec<f64> {
        let (nv, nh) = (p.num_visible, p.num_hidden);
        let mut out = vec![0.0; 1 << nv];
        for (v, o) in out.iter_mut().enumerate() {
            for h in 0..1usize << nh {
                let mut e = 0.0;
                for i in 0..nv {
                    e += p.visible_bias[i] * bit(v, i);
                    for j in 0..nh {
                        e += bit(v, i) * p.weight(i, j) * bit(h, j);
                    }
                }
                for j in 0..nh {
                    e += p.hidden_bias[j] * bit(h, j);
                }
                *o += e.exp();
            }
        }
        let z: f64 = out.iter().sum();
        out.iter().map(|x| x / z).collect()
    }

    proptest! {
        #[test]
        fn free_energy_matches_joint_sum(nv in 1usize..=4, nh in 1usize..=4, seed in any::<u64>()) {
            let mut p = RbmParams::random(nv, nh, 1.0, &mut RandomStream::new(seed)).unwrap();
            let mut rng = RandomStream::new(seed ^ 1);
            for b in p.visible_bias.iter_mut().chain(p.hidden_bias.iter_mut()) {
                *b = rng.random_range(-2.0..2.0);
            }
            let exact = p.exact_distribution();
            prop_assert!((exact.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            for (a, b) in exact.iter().zip(brute_force(&p)) {
                prop_assert!(*a > 0.0);
                prop_assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_learning_rate_is_noop() {
        let mut p = RbmParams::random(4, 3, 0.1, &mut RandomStream::new(1)).unwrap();
        let before = p.clone();
        p.cd1_update(&[1, 5, 9], 0.0, &mut RandomStream::new(2)).unwrap();
        assert_eq!(p, before);
        assert!(p.cd1_update(&[16], 0.1, &mut RandomStream::new(2)).is_err());
    }

    #[test]
    fn cd1_climbs_towards_delta_target() {
        let v_star = 0b1011;
        let seeds = 20;
        let mut monotone = 0;
        for seed in 0..seeds {
            let mut rng = RandomStream::new(seed);
            let mut p = RbmParams::random(4, 4, 0.01, &mut rng.substream("init")).unwrap();
            let mut prev = p.exact_distribution()[v_star];
            let mut ok = true;
            for _ in 0..100 {
                p.cd1_update(&[v_star; 64], 0.01, &mut rng).unwrap();
                let now = p.exact_distribution()[v_star];
                ok &= now > prev;
                prev = now;
            }
            monotone += usize::from(ok);
        }
        assert!(monotone * 10 >= seeds as usize * 9, "{monotone}/{seeds}");
    }

    #[test]
    fn zero_epoch_kld_identity() {
        let t = four_mode_mixture_2d(3, 3).unwrap();
        let cfg = RbmConfig { num_hidden: 5, epochs: 0, eval_every: 1, init_std: 0.0, ..Default::default() };
        let rec = train_rbm(&t, &cfg, &RandomStream::new(0), 0).unwrap();
        let expected = 64f64.ln() - shannon_entropy(&t);
        assert!((rec.final_eval().exact_kld - expected).abs() < 1e-12);
    }

    #[test]
    fn training_deterministic_and_improving() {
        let t = four_mode_mixture_2d(3, 3).unwrap();
        let cfg = RbmConfig { num_hidden: 8, epochs: 600, eval_every: 200, learning_rate: 0.1, ..Default::default() };
        let a = run_rbm_realizations(&t, &cfg, 4, 2, Some(2)).unwrap();
        let b = run_rbm_realizations(&t, &cfg, 4, 2, Some(1)).unwrap();
        assert_eq!(a.aggregate, b.aggregate);
        for r in &a.records {
            assert!(r.evals.iter().all(|e| e.exact_kld.is_finite() && e.empirical_kld.is_finite()));
            assert!(r.final_eval().exact_kld < r.evals[0].exact_kld);
            let p = params_from_record(r, 6, 8).unwrap();
            assert!((rbm_kld(&t, &p).unwrap() - r.final_eval().exact_kld).abs() < 1e-12);
        }
    }
}
