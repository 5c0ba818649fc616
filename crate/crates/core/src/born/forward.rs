use super::{Ansatz, ModelSpec, RotationSlot};
use crate::error::{Error, Result};
use crate::scramblers::{CompiledScrambler, PauliTermList};
use crate::statevector::{gates, hermitian_eigen, Axis, HermitianEigen, StateVector};
use crate::C64;

/// Layer Hamiltonian of the trainable-Hamiltonian ansatz.
pub fn layer_hamiltonian(model: &ModelSpec, params: &[f64], layer: usize) -> Result<PauliTermList> {
    let Ansatz::TrainableHamiltonian { energy_offset, .. } = model.ansatz else {
        return Err(Error::InvalidArgument("model has no layer Hamiltonians".into()));
    };
    model.check_params(params)?;
    let n = model.num_qubits;
    let mut h = PauliTermList::new(n);
    h.push(energy_offset, Vec::new());
    let j = params[model.coupling_index(layer)];
    for i in 0..n - 1 {
        h.push(-j, vec![(i, Axis::X), (i + 1, Axis::X)]);
    }
    for axis in [Axis::X, Axis::Y, Axis::Z] {
        for i in 0..n {
            h.push(-params[model.field_index(layer, i, axis)], vec![(i, axis)]);
        }
    }
    Ok(h)
}

pub(super) fn layer_eigen(model: &ModelSpec, params: &[f64], layer: usize) -> Result<HermitianEigen> {
    hermitian_eigen(&layer_hamiltonian(model, params, layer)?.to_dense()?)
}

pub(super) fn evolve(eigen: &HermitianEigen, tau: f64, amps: &[C64]) -> Vec<C64> {
    eigen.apply_spectral(|l| C64::from_polar(1.0, -tau * l), amps)
}

pub(super) fn rotate_layer(state: &mut StateVector, model: &ModelSpec, params: &[f64], layer: usize, slot: RotationSlot, sign: f64) -> Result<()> {
    let axis = match slot {
        RotationSlot::XPre => Axis::X,
        RotationSlot::ZPre => Axis::Z,
        RotationSlot::YPost => Axis::Y,
    };
    for q in 0..model.num_qubits {
        let theta = params[model.rotation_index(layer, q, slot)];
        state.apply_single_qubit_gate(q, &gates::rotation(axis, sign * theta))?;
    }
    Ok(())
}

fn scrambler_for<'a>(model: &ModelSpec, scrambler: Option<&'a CompiledScrambler>) -> Result<&'a CompiledScrambler> {
    let s = scrambler.ok_or(Error::MissingScrambler)?;
    if s.num_qubits() != model.num_qubits {
        return Err(Error::DimensionMismatch { expected: model.num_qubits, got: s.num_qubits() });
    }
    Ok(s)
}

/// `|ψ(θ)⟩ = U(θ)|0…0⟩`.
pub fn forward(model: &ModelSpec, params: &[f64], scrambler: Option<&CompiledScrambler>) -> Result<StateVector> {
    model.validate()?;
    model.check_params(params)?;
    let mut state = StateVector::zero_state(model.num_qubits)?;
    match model.ansatz {
        Ansatz::FixedScrambler { .. } => {
            let s = scrambler_for(model, scrambler)?;
            for layer in 0..model.num_layers {
                rotate_layer(&mut state, model, params, layer, RotationSlot::XPre, 1.0)?;
                rotate_layer(&mut state, model, params, layer, RotationSlot::ZPre, 1.0)?;
                s.apply(&mut state)?;
                rotate_layer(&mut state, model, params, layer, RotationSlot::YPost, 1.0)?;
            }
        }
        Ansatz::TrainableHamiltonian { tau, .. } => {
            for layer in 0..model.num_layers {
                let eigen = layer_eigen(model, params, layer)?;
                state = StateVector::from_amplitudes(evolve(&eigen, tau, state.amplitudes()))?;
            }
        }
    }
    Ok(state)
}

pub(super) fn scrambler_checked<'a>(model: &ModelSpec, scrambler: Option<&'a CompiledScrambler>) -> Result<&'a CompiledScrambler> {
    scrambler_for(model, scrambler)
}

/// Born distribution of the measured register, ancillas traced out.
pub fn output_distribution(model: &ModelSpec, params: &[f64], scrambler: Option<&CompiledScrambler>) -> Result<Vec<f64>> {
    forward(model, params, scrambler)?.marginal_probabilities(&model.ancilla_qubits())
}
