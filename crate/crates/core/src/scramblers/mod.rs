//! Fixed entangling unitaries ("scramblers").
//!
//! A [`ScramblerSpec`] is compiled once per realization into an immutable
//! [`CompiledScrambler`] that every ansatz layer reuses:
//!
//! * `Haar`: one dense Haar-random unitary on the full register.
//! * `Brickwork { depth }`: `depth` alternating layers of Haar-random
//!   two-qubit gates. Layer 0 pairs `(0,1), (2,3), …`, layer 1 pairs
//!   `(1,2), (3,4), …`, and so on.
//! * `Analog { hamiltonian, tau }`: `e^{−iτH}` built from the exact dense
//!   eigendecomposition of `H`.

mod hamiltonian;

pub use hamiltonian::{
    build_hamiltonian, expm_apply, HamiltonianPreset, HamiltonianSpec, PauliTerm, PauliTermList,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::statevector::{
    gates, haar_unitary, hermitian_eigen, DenseMatrix, Gate2, HermitianEigen, StateVector,
    MAX_DENSE_DIM,
};
use crate::C64;

/// Pairing convention recorded in result manifests.
pub const BRICKWORK_PAIRING: &str = "layer 0 pairs (0,1),(2,3),...; layer 1 pairs (1,2),(3,4),...; alternating";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ScramblerSpec {
    Identity,
    Haar,
    Brickwork { depth: usize },
    Analog { hamiltonian: HamiltonianSpec, tau: f64 },
}

impl ScramblerSpec {
    pub fn analog(preset: HamiltonianPreset, num_qubits: usize, tau: f64) -> Self {
        Self::Analog { hamiltonian: preset.spec(num_qubits), tau }
    }

    /// Short label used in result files.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::Haar => "haar",
            Self::Brickwork { .. } => "brickwork",
            Self::Analog { .. } => "analog",
        }
    }
}

/// One gate of a compiled brickwork circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct BrickGate {
    pub qubits: (usize, usize),
    pub matrix: Gate2,
}

#[derive(Clone, Debug)]
enum Operator {
    Identity,
    Dense(DenseMatrix),
    Circuit(Vec<BrickGate>),
    Evolution {
        eigen: HermitianEigen,
        unitary: DenseMatrix,
    },
}

/// Executable scrambler. Immutable once compiled.
#[derive(Clone, Debug)]
pub struct CompiledScrambler {
    spec: ScramblerSpec,
    num_qubits: usize,
    op: Operator,
}

/// Compiles `spec` for `num_qubits` qubits, drawing any random gates from `rng`.
pub fn compile_scrambler(spec: &ScramblerSpec, num_qubits: usize, rng: &mut RandomStream) -> Result<CompiledScrambler> {
    if num_qubits == 0 {
        return Err(Error::InvalidArgument("scrambler needs at least one qubit".into()));
    }
    let dim = 1usize << num_qubits.min(63);
    let dense_guard = || {
        if dim > MAX_DENSE_DIM {
            Err(Error::Capacity { what: "dense scrambler dimension", got: dim, limit: MAX_DENSE_DIM })
        } else {
            Ok(())
        }
    };
    let op = match spec {
        ScramblerSpec::Identity => Operator::Identity,
        ScramblerSpec::Haar => {
            dense_guard()?;
            Operator::Dense(haar_unitary(dim, rng))
        }
        ScramblerSpec::Brickwork { depth } => {
            if *depth == 0 {
                return Err(Error::InvalidArgument("brickwork depth must be ≥ 1".into()));
            }
            let mut circuit = Vec::new();
            for layer in 0..*depth {
                let mut a = layer % 2;
                while a + 1 < num_qubits {
                    circuit.push(BrickGate {
                        qubits: (a, a + 1),
                        matrix: gate4(&haar_unitary(4, rng)),
                    });
                    a += 2;
                }
            }
            Operator::Circuit(circuit)
        }
        ScramblerSpec::Analog { hamiltonian, tau } => {
            if hamiltonian.num_qubits != num_qubits {
                return Err(Error::DimensionMismatch { expected: num_qubits, got: hamiltonian.num_qubits });
            }
            if !(tau.is_finite() && *tau >= 0.0) {
                return Err(Error::InvalidArgument(format!("evolution time must be ≥ 0, got {tau}")));
            }
            dense_guard()?;
            let eigen = hermitian_eigen(&build_hamiltonian(hamiltonian)?.to_dense()?)?;
            let tau = *tau;
            let unitary = eigen.map_spectrum(|l| C64::from_polar(1.0, -tau * l));
            Operator::Evolution { eigen, unitary }
        }
    };
    Ok(CompiledScrambler { spec: spec.clone(), num_qubits, op })
}

fn gate4(m: &DenseMatrix) -> Gate2 {
    let mut g = gates::identity4();
    for (i, row) in g.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = m.get(i, j);
        }
    }
    g
}

impl CompiledScrambler {
    pub fn spec(&self) -> &ScramblerSpec {
        &self.spec
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Two-qubit gates of a brickwork scrambler, in application order.
    pub fn gates(&self) -> Option<&[BrickGate]> {
        match &self.op {
            Operator::Circuit(c) => Some(c),
            _ => None,
        }
    }

    /// Cached eigendecomposition of an analog scrambler's Hamiltonian.
    pub fn eigen(&self) -> Option<&HermitianEigen> {
        match &self.op {
            Operator::Evolution { eigen, .. } => Some(eigen),
            _ => None,
        }
    }

    /// Full unitary as a dense matrix (built on demand for circuits).
    pub fn to_dense(&self) -> Result<DenseMatrix> {
        let dim = 1usize << self.num_qubits;
        match &self.op {
            Operator::Dense(u) | Operator::Evolution { unitary: u, .. } => Ok(u.clone()),
            _ => {
                if dim > MAX_DENSE_DIM {
                    return Err(Error::Capacity { what: "dense scrambler dimension", got: dim, limit: MAX_DENSE_DIM });
                }
                let mut cols = Vec::with_capacity(dim);
                for j in 0..dim {
                    let mut amps = vec![C64::new(0.0, 0.0); dim];
                    amps[j] = C64::new(1.0, 0.0);
                    let mut s = StateVector::from_amplitudes(amps)?;
                    self.apply(&mut s)?;
                    cols.push(s.into_amplitudes());
                }
                Ok(DenseMatrix::from_fn(dim, |i, j| cols[j][i]))
            }
        }
    }

    fn check(&self, state: &StateVector) -> Result<()> {
        if state.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch { expected: self.num_qubits, got: state.num_qubits() });
        }
        Ok(())
    }

    /// `ψ ← U_S ψ`.
    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        self.check(state)?;
        match &self.op {
            Operator::Identity => Ok(()),
            Operator::Dense(u) | Operator::Evolution { unitary: u, .. } => state.apply_dense_unitary(u),
            Operator::Circuit(gates) => {
                for g in gates {
                    state.apply_two_qubit_gate(g.qubits.0, g.qubits.1, &g.matrix)?;
                }
                Ok(())
            }
        }
    }

    /// `ψ ← U_S† ψ`.
    pub fn apply_adjoint(&self, state: &mut StateVector) -> Result<()> {
        self.check(state)?;
        match &self.op {
            Operator::Identity => Ok(()),
            Operator::Dense(u) | Operator::Evolution { unitary: u, .. } => state.apply_dense_adjoint(u),
            Operator::Circuit(gates) => {
                for g in gates.iter().rev() {
                    state.apply_two_qubit_gate(g.qubits.0, g.qubits.1, &gates::adjoint2(&g.matrix))?;
                }
                Ok(())
            }
        }
    }

    /// Half-chain entropy of `U_S|0…0⟩`.
    pub fn half_chain_entropy(&self) -> Result<f64> {
        let mut s = StateVector::zero_state(self.num_qubits)?;
        self.apply(&mut s)?;
        s.half_chain_entropy()
    }
}

/// Mean entanglement entropy (nats) of a `d_a`-dimensional subsystem of a
/// Haar-random pure state on `d_a·d_b` dimensions:
/// `Σ_{k=d_b+1}^{d_a d_b} 1/k − (d_a − 1)/(2 d_b)`.
pub fn page_entropy(d_a: usize, d_b: usize) -> Result<f64> {
    if d_a == 0 || d_a > d_b {
        return Err(Error::InvalidArgument(format!(
            "page_entropy needs 1 ≤ d_a ≤ d_b, got d_a={d_a}, d_b={d_b}"
        )));
    }
    let harmonic: f64 = (d_b + 1..=d_a * d_b).rev().map(|k| 1.0 / k as f64).sum();
    Ok(harmonic - (d_a as f64 - 1.0) / (2.0 * d_b as f64))
}

/// Page value for an `N`-qubit chain cut in half.
pub fn half_chain_page_entropy(num_qubits: usize) -> f64 {
    let a = num_qubits / 2;
    page_entropy(1 << a, 1 << (num_qubits - a)).expect("valid split")
}
