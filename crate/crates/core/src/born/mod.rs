//! The layered Born-machine ansatz.
//!
//! Fixed-scrambler layer `ℓ` applies `R_x(θ_{i,x})` then `R_z(θ_{i,z})` on
//! every qubit, then the shared scrambler `U_S`, then `R_y(θ_{i,y})` on every
//! qubit; layer 0 acts first. The trainable-Hamiltonian variant replaces each
//! layer by `exp(−iτ H_ℓ)` with
//! `H_ℓ = −J_ℓ Σ_i X_i X_{i+1} − Σ_{i,α} h_{α,i}^{(ℓ)} σ^α_i`.
//!
//! Ancillas are the `N_A` highest-index qubits, so the measured register is
//! the low `n = N − N_A` bits of the basis index and bin `x` is that value.

mod adjoint;
mod forward;

pub use adjoint::loss_and_gradient;
pub use forward::{forward, layer_hamiltonian, output_distribution};

use std::f64::consts::PI;
use std::ops::{Deref, DerefMut};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::scramblers::ScramblerSpec;
use crate::statevector::MAX_DENSE_DIM;

/// How the layers entangle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Ansatz {
    /// Trainable rotations around one fixed scrambler reused in every layer.
    FixedScrambler { scrambler: ScramblerSpec },
    /// Each layer evolves for `tau` under its own trainable Hamiltonian.
    /// `energy_offset` adds a constant to every layer Hamiltonian (a global
    /// phase; zero unless testing gauge invariance).
    TrainableHamiltonian {
        tau: f64,
        #[serde(default)]
        energy_offset: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub num_qubits: usize,
    pub num_ancillas: usize,
    pub num_layers: usize,
    pub ansatz: Ansatz,
}

/// Position of an angle inside one qubit's triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotationSlot {
    XPre = 0,
    ZPre = 1,
    YPost = 2,
}

impl ModelSpec {
    pub fn new(num_qubits: usize, num_ancillas: usize, num_layers: usize, ansatz: Ansatz) -> Result<Self> {
        let spec = Self { num_qubits, num_ancillas, num_layers, ansatz };
        spec.validate()?;
        Ok(spec)
    }

    pub fn fixed(num_qubits: usize, num_ancillas: usize, num_layers: usize, scrambler: ScramblerSpec) -> Result<Self> {
        Self::new(num_qubits, num_ancillas, num_layers, Ansatz::FixedScrambler { scrambler })
    }

    pub fn trainable_hamiltonian(num_qubits: usize, num_ancillas: usize, num_layers: usize, tau: f64) -> Result<Self> {
        Self::new(
            num_qubits,
            num_ancillas,
            num_layers,
            Ansatz::TrainableHamiltonian { tau, energy_offset: 0.0 },
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_qubits == 0 || (1usize << self.num_qubits.min(63)) > MAX_DENSE_DIM {
            return Err(Error::Capacity { what: "model qubit count", got: self.num_qubits, limit: 12 });
        }
        if self.num_ancillas >= self.num_qubits {
            return Err(Error::InvalidArgument(format!(
                "need N_A < N, got N_A={} N={}",
                self.num_ancillas, self.num_qubits
            )));
        }
        if self.num_layers == 0 {
            return Err(Error::InvalidArgument("need at least one layer".into()));
        }
        if let Ansatz::TrainableHamiltonian { tau, energy_offset } = self.ansatz {
            if !(tau.is_finite() && tau >= 0.0) || !energy_offset.is_finite() {
                return Err(Error::InvalidArgument(format!("invalid evolution time {tau}")));
            }
            if self.num_qubits < 2 {
                return Err(Error::InvalidArgument("trainable Hamiltonian needs N ≥ 2".into()));
            }
        }
        Ok(())
    }

    /// `3LN` for fixed scramblers, `(3N+1)L` for trainable Hamiltonians.
    pub fn num_params(&self) -> usize {
        self.params_per_layer() * self.num_layers
    }

    pub fn params_per_layer(&self) -> usize {
        match self.ansatz {
            Ansatz::FixedScrambler { .. } => 3 * self.num_qubits,
            Ansatz::TrainableHamiltonian { .. } => 3 * self.num_qubits + 1,
        }
    }

    /// Number of measured qubits `n = N − N_A`.
    pub fn num_measured(&self) -> usize {
        self.num_qubits - self.num_ancillas
    }

    pub fn num_bins(&self) -> usize {
        1 << self.num_measured()
    }

    pub fn ancilla_qubits(&self) -> Vec<usize> {
        (self.num_measured()..self.num_qubits).collect()
    }

    pub fn is_fixed_scrambler(&self) -> bool {
        matches!(self.ansatz, Ansatz::FixedScrambler { .. })
    }

    /// Flat index of a rotation angle (fixed-scrambler layout).
    pub fn rotation_index(&self, layer: usize, qubit: usize, slot: RotationSlot) -> usize {
        (layer * self.num_qubits + qubit) * 3 + slot as usize
    }

    /// Flat index of `J_xx^{(ℓ)}` (trainable-Hamiltonian layout).
    pub fn coupling_index(&self, layer: usize) -> usize {
        layer * self.params_per_layer()
    }

    /// Flat index of `h_{α,i}^{(ℓ)}` (trainable-Hamiltonian layout).
    pub fn field_index(&self, layer: usize, qubit: usize, axis: crate::statevector::Axis) -> usize {
        use crate::statevector::Axis;
        let block = match axis {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        };
        self.coupling_index(layer) + 1 + block * self.num_qubits + qubit
    }

    pub(crate) fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_params() {
            return Err(Error::ParameterCount { expected: self.num_params(), got: params.len() });
        }
        Ok(())
    }

    /// Random initial parameters: angles and fields uniform on `(−π, π)`,
    /// couplings `J_xx = 1`.
    pub fn init_params(&self, rng: &mut RandomStream) -> ParameterSet {
        let mut values: Vec<f64> = (0..self.num_params()).map(|_| rng.random_range(-PI..PI)).collect();
        if !self.is_fixed_scrambler() {
            for layer in 0..self.num_layers {
                values[self.coupling_index(layer)] = INITIAL_COUPLING;
            }
        }
        ParameterSet(values)
    }
}

/// Initial `J_xx^{(ℓ)}` for the trainable-Hamiltonian ansatz.
pub const INITIAL_COUPLING: f64 = 1.0;

/// Trainable parameters in the flat layout described by [`ModelSpec`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet(pub Vec<f64>);

impl ParameterSet {
    pub fn zeros(model: &ModelSpec) -> Self {
        Self(vec![0.0; model.num_params()])
    }
}

impl Deref for ParameterSet {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for ParameterSet {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}
