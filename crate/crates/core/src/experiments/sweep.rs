//! Expansion of a config into an ordered list of sweep points.

use serde::Serialize;

use super::config::{ExperimentConfig, ExperimentKind};
use crate::born::{Ansatz, ModelSpec};
use crate::error::Result;
use crate::rbm::{matched_hidden_units, parameter_count, PARAMETER_BUDGET};
use crate::scramblers::{HamiltonianPreset, ScramblerSpec};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum PointModel {
    Qsbm(ModelSpec),
    Rbm { num_visible: usize, num_hidden: usize },
}

/// One fully resolved configuration; jobs are (point, realization) pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub index: usize,
    pub model: PointModel,
    pub rho: Option<f64>,
}

impl SweepPoint {
    pub fn model_name(&self) -> &'static str {
        match self.model {
            PointModel::Qsbm(_) => "qsbm",
            PointModel::Rbm { .. } => "rbm",
        }
    }

    pub fn scrambler_type(&self) -> &'static str {
        match &self.model {
            PointModel::Qsbm(m) => match &m.ansatz {
                Ansatz::FixedScrambler { scrambler } => scrambler.kind_name(),
                Ansatz::TrainableHamiltonian { .. } => "trainable_hamiltonian",
            },
            PointModel::Rbm { .. } => "",
        }
    }

    pub fn hamiltonian_preset(&self) -> &'static str {
        let PointModel::Qsbm(m) = &self.model else { return "" };
        match &m.ansatz {
            Ansatz::FixedScrambler { scrambler: ScramblerSpec::Analog { hamiltonian, .. } } => {
                [HamiltonianPreset::Tfim, HamiltonianPreset::Xx]
                    .into_iter()
                    .find(|p| p.spec(m.num_qubits) == *hamiltonian)
                    .map_or("custom", |p| p.name())
            }
            _ => "",
        }
    }

    pub fn num_qubits(&self) -> usize {
        match &self.model {
            PointModel::Qsbm(m) => m.num_qubits,
            PointModel::Rbm { num_visible, .. } => *num_visible,
        }
    }

    pub fn num_ancillas(&self) -> Option<usize> {
        match &self.model {
            PointModel::Qsbm(m) => Some(m.num_ancillas),
            PointModel::Rbm { .. } => None,
        }
    }

    pub fn num_layers(&self) -> Option<usize> {
        match &self.model {
            PointModel::Qsbm(m) => Some(m.num_layers),
            PointModel::Rbm { .. } => None,
        }
    }

    pub fn depth(&self) -> Option<usize> {
        match &self.model {
            PointModel::Qsbm(ModelSpec {
                ansatz: Ansatz::FixedScrambler { scrambler: ScramblerSpec::Brickwork { depth } },
                ..
            }) => Some(*depth),
            _ => None,
        }
    }

    pub fn tau(&self) -> Option<f64> {
        match &self.model {
            PointModel::Qsbm(m) => match &m.ansatz {
                Ansatz::FixedScrambler { scrambler: ScramblerSpec::Analog { tau, .. } } => Some(*tau),
                Ansatz::TrainableHamiltonian { tau, .. } => Some(*tau),
                _ => None,
            },
            PointModel::Rbm { .. } => None,
        }
    }

    pub fn num_hidden(&self) -> Option<usize> {
        match self.model {
            PointModel::Rbm { num_hidden, .. } => Some(num_hidden),
            PointModel::Qsbm(_) => None,
        }
    }

    pub fn num_params(&self) -> usize {
        match &self.model {
            PointModel::Qsbm(m) => m.num_params(),
            PointModel::Rbm { num_visible, num_hidden } => parameter_count(*num_visible, *num_hidden),
        }
    }

    /// Bits of the target register (measured qubits or visible units).
    pub fn target_bits(&self) -> usize {
        match &self.model {
            PointModel::Qsbm(m) => m.num_measured(),
            PointModel::Rbm { num_visible, .. } => *num_visible,
        }
    }
}

fn or_scalar<T: Clone>(axis: &[T], scalar: T) -> Vec<T> {
    if axis.is_empty() {
        vec![scalar]
    } else {
        axis.to_vec()
    }
}

/// Sweep points in canonical order. Point indices follow this order.
pub fn expand(config: &ExperimentConfig) -> Result<Vec<SweepPoint>> {
    use ExperimentKind::*;
    let m = &config.model;
    let n = m.num_qubits;
    let sweep = &config.sweep;
    let layers = or_scalar(&sweep.layers, m.num_layers);
    let ancillas = or_scalar(&sweep.ancillas, m.num_ancillas);
    let rhos: Vec<Option<f64>> =
        if sweep.rhos.is_empty() { vec![None] } else { sweep.rhos.iter().copied().map(Some).collect() };

    let mut models: Vec<(PointModel, Option<f64>)> = Vec::new();
    let fixed = |a: usize, l: usize, s: ScramblerSpec, out: &mut Vec<_>| -> Result<()> {
        out.push((PointModel::Qsbm(ModelSpec::fixed(n, a, l, s)?), None));
        Ok(())
    };
    match config.kind {
        HaarLayers => {
            for &a in &ancillas {
                for &l in &layers {
                    fixed(a, l, ScramblerSpec::Haar, &mut models)?;
                }
            }
        }
        BrickworkDepth => {
            for &a in &ancillas {
                if sweep.haar_reference {
                    for &l in &layers {
                        fixed(a, l, ScramblerSpec::Haar, &mut models)?;
                    }
                }
                for &k in &sweep.depths {
                    for &l in &layers {
                        fixed(a, l, ScramblerSpec::Brickwork { depth: k }, &mut models)?;
                    }
                }
            }
        }
        AnalogTau => {
            let presets = or_scalar(&sweep.presets, HamiltonianPreset::Tfim);
            for &a in &ancillas {
                if sweep.haar_reference {
                    for &l in &layers {
                        fixed(a, l, ScramblerSpec::Haar, &mut models)?;
                    }
                }
                for &p in &presets {
                    for &t in &sweep.taus {
                        for &l in &layers {
                            fixed(a, l, ScramblerSpec::analog(p, n, t), &mut models)?;
                        }
                    }
                }
            }
        }
        TrainableHamiltonian2d | ClassicalComparison => {
            let taus = or_scalar(&sweep.taus, m.tau);
            for &rho in &rhos {
                for &a in &ancillas {
                    for &t in &taus {
                        for &l in &layers {
                            let spec = ModelSpec::trainable_hamiltonian(n, a, l, t)?;
                            models.push((PointModel::Qsbm(spec), rho));
                        }
                    }
                }
                if config.kind == ClassicalComparison {
                    let visible = if sweep.rbm_visible.is_empty() {
                        let mut v: Vec<usize> = ancillas.iter().map(|a| n - a).collect();
                        v.dedup();
                        v
                    } else {
                        sweep.rbm_visible.clone()
                    };
                    for &nv in &visible {
                        let hidden = if sweep.rbm_hidden.is_empty() {
                            vec![matched_hidden_units(nv, PARAMETER_BUDGET)]
                        } else {
                            sweep.rbm_hidden.clone()
                        };
                        for &nh in &hidden {
                            models.push((PointModel::Rbm { num_visible: nv, num_hidden: nh }, rho));
                        }
                    }
                }
            }
        }
        SingleRun => {
            let ansatz = m.ansatz.clone().unwrap_or(Ansatz::FixedScrambler { scrambler: ScramblerSpec::Haar });
            let spec = ModelSpec::new(n, m.num_ancillas, m.num_layers, ansatz)?;
            models.push((PointModel::Qsbm(spec), rhos[0]));
        }
    }
    Ok(models.into_iter().enumerate().map(|(index, (model, rho))| SweepPoint { index, model, rho }).collect())
}

/// Plain-text table of the resolved sweep, one line per point.
pub fn describe(points: &[SweepPoint], num_realizations: usize) -> String {
    let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
    let mut out = format!(
        "{:>5}  {:<5} {:<22} {:<6} {:>3} {:>3} {:>3} {:>3} {:>6} {:>6} {:>4} {:>6}\n",
        "point", "model", "scrambler", "preset", "N", "N_A", "L", "K", "tau", "rho", "n_h", "params"
    );
    for p in points {
        out.push_str(&format!(
            "{:>5}  {:<5} {:<22} {:<6} {:>3} {:>3} {:>3} {:>3} {:>6} {:>6} {:>4} {:>6}\n",
            p.index,
            p.model_name(),
            opt(Some(p.scrambler_type().to_string()).filter(|s| !s.is_empty())),
            opt(Some(p.hamiltonian_preset().to_string()).filter(|s| !s.is_empty())),
            p.num_qubits(),
            opt(p.num_ancillas().map(|v| v.to_string())),
            opt(p.num_layers().map(|v| v.to_string())),
            opt(p.depth().map(|v| v.to_string())),
            opt(p.tau().map(|v| v.to_string())),
            opt(p.rho.map(|v| v.to_string())),
            opt(p.num_hidden().map(|v| v.to_string())),
            p.num_params(),
        ));
    }
    out.push_str(&format!(
        "{} points x {} realizations = {} jobs\n",
        points.len(),
        num_realizations,
        points.len() * num_realizations
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(kind: &str, sweep: &str, target: &str, extra: &str) -> ExperimentConfig {
        let text = format!(
            r#"{{"name":"t","kind":"{kind}","model":{{"num_qubits":8,"num_ancillas":1,"num_layers":2}},
            "sweep":{sweep},"target":{target}{extra}}}"#
        );
        ExperimentConfig::from_json_str(&text).unwrap()
    }

    const MULTI: &str = r#"{"type":"multimodal_1d"}"#;

    #[test]
    fn haar_layer_grid_counts() {
        let c = config("haar_layers", r#"{"layers":[2,4,6,8],"ancillas":[0,1,2]}"#, MULTI, "");
        let points = expand(&c).unwrap();
        assert_eq!(points.len(), 12);
        assert_eq!(points[5].num_ancillas(), Some(1));
        assert_eq!(points[5].num_layers(), Some(4));
        assert!(points.iter().enumerate().all(|(i, p)| p.index == i));
        assert_eq!(points[11].target_bits(), 6);
    }

    #[test]
    fn brickwork_and_analog_include_haar_reference() {
        let c = config("brickwork_depth", r#"{"layers":[2,6],"depths":[1,2,5]}"#, MULTI, "");
        let points = expand(&c).unwrap();
        assert_eq!(points.len(), 8);
        assert_eq!(points[0].scrambler_type(), "haar");
        assert_eq!(points[2].depth(), Some(1));
        let c = config("analog_tau", r#"{"layers":[2,6],"taus":[0.01,0.5,5],"presets":["tfim","xx"]}"#, MULTI, "");
        let points = expand(&c).unwrap();
        assert_eq!(points.len(), 2 + 12);
        assert_eq!(points[2].hamiltonian_preset(), "tfim");
        assert_eq!(points[13].hamiltonian_preset(), "xx");
        assert_eq!(points[13].tau(), Some(5.0));
        let c = config("analog_tau", r#"{"taus":[1],"haar_reference":false}"#, MULTI, "");
        assert_eq!(expand(&c).unwrap().len(), 1);
    }

    #[test]
    fn comparison_adds_rbm_points() {
        let c = config(
            "classical_comparison",
            r#"{"ancillas":[2],"rbm_visible":[6,8]}"#,
            r#"{"type":"four_mode_mixture_2d"}"#,
            r#","rbm":{"epochs":100,"eval_every":50}"#,
        );
        let points = expand(&c).unwrap();
        assert_eq!(points.len(), 3);
        assert_eq!(points[0].scrambler_type(), "trainable_hamiltonian");
        assert_eq!(points[0].num_params(), 25 * 2);
        assert_eq!((points[1].num_hidden(), points[1].num_params()), (Some(43), 307));
        assert_eq!((points[2].num_hidden(), points[2].num_params()), (Some(33), 305));
        assert!(describe(&points, 5).contains("3 points x 5 realizations = 15 jobs"));
    }
}
