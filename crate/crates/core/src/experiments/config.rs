//! Experiment configuration documents.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::born::Ansatz;
use crate::error::{Error, Result};
use crate::rbm::RbmConfig;
use crate::scramblers::HamiltonianPreset;
use crate::targets::TargetSpec;
use crate::training::TrainConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Haar scrambler, sweeping layers and ancillas.
    HaarLayers,
    /// Brickwork scrambler, sweeping circuit depth and layers.
    BrickworkDepth,
    /// Analog scrambler, sweeping evolution time, preset and layers.
    AnalogTau,
    /// Trainable-Hamiltonian layers on a 2D target.
    #[serde(rename = "trainable_hamiltonian_2d")]
    TrainableHamiltonian2d,
    /// Trainable-Hamiltonian model next to RBM baselines on the same target.
    ClassicalComparison,
    /// One model, one sweep point.
    SingleRun,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::HaarLayers => "haar_layers",
            ExperimentKind::BrickworkDepth => "brickwork_depth",
            ExperimentKind::AnalogTau => "analog_tau",
            ExperimentKind::TrainableHamiltonian2d => "trainable_hamiltonian_2d",
            ExperimentKind::ClassicalComparison => "classical_comparison",
            ExperimentKind::SingleRun => "single_run",
        }
    }
}

/// Scalar model settings. Sweep axes, when present, replace the matching scalar.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSettings {
    pub num_qubits: usize,
    #[serde(default)]
    pub num_ancillas: usize,
    #[serde(default = "one")]
    pub num_layers: usize,
    /// Evolution time of the trainable-Hamiltonian layers.
    #[serde(default = "half")]
    pub tau: f64,
    /// Ansatz for `single_run`; a Haar scrambler when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ansatz: Option<Ansatz>,
}

fn one() -> usize {
    1
}

fn half() -> f64 {
    0.5
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxes {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub layers: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ancillas: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub depths: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub taus: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rhos: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub presets: Vec<HamiltonianPreset>,
    /// Adds a Haar-scrambler point at every layer count (brickwork and analog sweeps).
    #[serde(default = "yes")]
    pub haar_reference: bool,
    /// RBM hidden-layer sizes; the largest within the parameter budget when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rbm_hidden: Vec<usize>,
    /// RBM visible-layer sizes; the quantum model's measured qubits when empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rbm_visible: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: ExperimentKind,
    /// Full-size settings; runs print a runtime warning.
    #[serde(default)]
    pub paper_scale: bool,
    pub model: ModelSettings,
    #[serde(default)]
    pub sweep: SweepAxes,
    pub target: TargetSpec,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rbm: Option<RbmConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

/// Line of the first occurrence of `"key"` in `text`, 1-based.
fn line_of_key(text: &str, key: &str) -> usize {
    let quoted = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&quoted)).map_or(1, |i| i + 1)
}

impl ExperimentConfig {
    /// Parses and validates a JSON document. Errors name the offending line.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)
            .map_err(|e| Error::Config { line: e.line().max(1), message: e.to_string() })?;
        config.validate().map_err(|(key, message)| Error::Config { line: line_of_key(text, key), message })?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Semantic checks; the error carries the JSON key it concerns.
    pub fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        use ExperimentKind::*;
        if self.name.is_empty() || self.name.contains(['/', '\\', ',', '"']) {
            return Err(("name", format!("experiment name {:?} must be non-empty without / \\ , \"", self.name)));
        }
        self.train.validate().map_err(|e| ("train", e.to_string()))?;
        if let Some(rbm) = &self.rbm {
            rbm.validate().map_err(|e| ("rbm", e.to_string()))?;
        }
        let m = &self.model;
        if !(2..=12).contains(&m.num_qubits) {
            return Err(("num_qubits", format!("num_qubits {} outside 2..=12", m.num_qubits)));
        }
        let ancillas = if self.sweep.ancillas.is_empty() { vec![m.num_ancillas] } else { self.sweep.ancillas.clone() };
        if let Some(a) = ancillas.iter().find(|&&a| a >= m.num_qubits) {
            return Err(("ancillas", format!("{a} ancillas leave no measured qubit out of {}", m.num_qubits)));
        }
        if self.sweep.layers.iter().chain([&m.num_layers]).any(|&l| l == 0) {
            return Err(("layers", "layer counts must be ≥ 1".into()));
        }
        if self.sweep.depths.contains(&0) {
            return Err(("depths", "brickwork depths must be ≥ 1".into()));
        }
        if self.sweep.taus.iter().chain([&m.tau]).any(|t| !t.is_finite() || *t < 0.0) {
            return Err(("taus", "evolution times must be finite and ≥ 0".into()));
        }
        if self.sweep.rhos.iter().any(|r| !(r.abs() < 1.0)) {
            return Err(("rhos", "correlations must satisfy |ρ| < 1".into()));
        }
        if !self.sweep.rhos.is_empty() && !matches!(self.target, TargetSpec::BivariateGaussian2d { .. }) {
            return Err(("rhos", "a ρ sweep needs the bivariate_gaussian_2d target".into()));
        }
        let two_d = !matches!(self.target, TargetSpec::Multimodal1d { .. });
        match self.kind {
            BrickworkDepth if self.sweep.depths.is_empty() => {
                return Err(("depths", "brickwork_depth needs at least one depth".into()))
            }
            AnalogTau if self.sweep.taus.is_empty() => {
                return Err(("taus", "analog_tau needs at least one τ".into()))
            }
            TrainableHamiltonian2d | ClassicalComparison if !two_d => {
                return Err(("target", format!("{} needs a 2D target", self.kind.name())))
            }
            ClassicalComparison if self.rbm.is_none() => {
                return Err(("kind", "classical_comparison needs an rbm section".into()))
            }
            _ => {}
        }
        if self.kind != ClassicalComparison && (self.rbm.is_some() || !self.sweep.rbm_hidden.is_empty()) {
            return Err(("rbm", "RBM settings only apply to classical_comparison".into()));
        }
        if self.kind != SingleRun && m.ansatz.is_some() {
            return Err(("ansatz", "model.ansatz only applies to single_run".into()));
        }
        if let Some(v) = self.sweep.rbm_visible.iter().find(|&&v| !(2..=crate::rbm::MAX_VISIBLE).contains(&v)) {
            return Err(("rbm_visible", format!("{v} visible units outside 2..=16")));
        }
        if let Err(e) = super::sweep::expand(self) {
            return Err(("model", e.to_string()));
        }
        Ok(())
    }

    /// Output directory: `override_dir`, else the configured one, else `results/<name>`.
    pub fn resolve_output_dir(&self, override_dir: Option<&Path>) -> PathBuf {
        override_dir
            .map(Path::to_path_buf)
            .or_else(|| self.output_dir.clone())
            .unwrap_or_else(|| PathBuf::from("results").join(&self.name))
    }
}
