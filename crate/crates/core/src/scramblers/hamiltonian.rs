//! Nearest-neighbour spin-chain Hamiltonians as Pauli-term lists.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{hermitian_eigen, Axis, DenseMatrix, StateVector, MAX_DENSE_DIM};
use crate::C64;

/// Open-boundary chain
/// `H = −Σ_i (J_xx XX + J_yy YY + J_zz ZZ)_{i,i+1} − h_x Σ_i X_i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    pub num_qubits: usize,
    pub j_xx: f64,
    pub j_yy: f64,
    pub j_zz: f64,
    pub h_x: f64,
}

/// Named coupling presets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HamiltonianPreset {
    /// Transverse-field Ising: `J_zz = h_x = 1`.
    Tfim,
    /// XX chain in a transverse field: `J_xx = J_yy = h_x = 1`.
    Xx,
}

impl HamiltonianPreset {
    pub fn spec(self, num_qubits: usize) -> HamiltonianSpec {
        match self {
            Self::Tfim => HamiltonianSpec { num_qubits, j_xx: 0.0, j_yy: 0.0, j_zz: 1.0, h_x: 1.0 },
            Self::Xx => HamiltonianSpec { num_qubits, j_xx: 1.0, j_yy: 1.0, j_zz: 0.0, h_x: 1.0 },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Tfim => "tfim",
            Self::Xx => "xx",
        }
    }
}

/// One Pauli string with a real coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coefficient: f64,
    pub ops: Vec<(usize, Axis)>,
}

impl PauliTerm {
    /// Bit flips produced by the string and its phase on basis state `x`:
    /// `P|x⟩ = phase · |x ⊕ flip⟩`.
    #[inline]
    fn action(&self, x: usize) -> (usize, C64) {
        let mut flip = 0usize;
        let mut phase = C64::new(1.0, 0.0);
        for &(q, axis) in &self.ops {
            let bit = (x >> q) & 1;
            match axis {
                Axis::X => flip ^= 1 << q,
                Axis::Y => {
                    flip ^= 1 << q;
                    // Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩
                    phase *= if bit == 0 { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) };
                }
                Axis::Z => {
                    if bit == 1 {
                        phase = -phase;
                    }
                }
            }
        }
        (flip, phase)
    }
}

/// Hermitian operator `Σ_k c_k P_k` with real `c_k`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PauliTermList {
    pub num_qubits: usize,
    pub terms: Vec<PauliTerm>,
}

impl PauliTermList {
    pub fn new(num_qubits: usize) -> Self {
        Self { num_qubits, terms: Vec::new() }
    }

    pub fn push(&mut self, coefficient: f64, ops: Vec<(usize, Axis)>) {
        if coefficient != 0.0 {
            self.terms.push(PauliTerm { coefficient, ops });
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_dense(&self) -> Result<DenseMatrix> {
        let dim = 1usize << self.num_qubits;
        if dim > MAX_DENSE_DIM {
            return Err(Error::Capacity {
                what: "dense Hamiltonian dimension",
                got: dim,
                limit: MAX_DENSE_DIM,
            });
        }
        let mut h = DenseMatrix::zeros(dim);
        for term in &self.terms {
            for x in 0..dim {
                let (flip, phase) = term.action(x);
                h.add_to(x ^ flip, x, phase * term.coefficient);
            }
        }
        Ok(h)
    }

    /// Matrix-free `H|ψ⟩`.
    pub fn apply(&self, state: &StateVector) -> Vec<C64> {
        let amps = state.amplitudes();
        let mut out = vec![C64::new(0.0, 0.0); amps.len()];
        for term in &self.terms {
            for (x, a) in amps.iter().enumerate() {
                let (flip, phase) = term.action(x);
                out[x ^ flip] += phase * term.coefficient * a;
            }
        }
        out
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn expectation(&self, state: &StateVector) -> f64 {
        let hpsi = self.apply(state);
        state
            .amplitudes()
            .iter()
            .zip(&hpsi)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }
}

/// Pauli expansion of a [`HamiltonianSpec`]: per bond `i = 0..N−2` the
/// `XX`, `YY`, `ZZ` couplings (zero coefficients dropped), then one `X`
/// field per site.
pub fn build_hamiltonian(spec: &HamiltonianSpec) -> Result<PauliTermList> {
    let n = spec.num_qubits;
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "a spin chain needs at least 2 sites, got {n}"
        )));
    }
    for v in [spec.j_xx, spec.j_yy, spec.j_zz, spec.h_x] {
        if !v.is_finite() {
            return Err(Error::InvalidArgument("non-finite coupling".into()));
        }
    }
    let mut h = PauliTermList::new(n);
    for i in 0..n - 1 {
        for (j, axis) in [(spec.j_xx, Axis::X), (spec.j_yy, Axis::Y), (spec.j_zz, Axis::Z)] {
            h.push(-j, vec![(i, axis), (i + 1, axis)]);
        }
    }
    for i in 0..n {
        h.push(-spec.h_x, vec![(i, Axis::X)]);
    }
    Ok(h)
}

/// `e^{−iτH}|ψ⟩` through the dense eigendecomposition of `H`.
pub fn expm_apply(hamiltonian: &PauliTermList, tau: f64, state: &StateVector) -> Result<StateVector> {
    if hamiltonian.num_qubits != state.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: state.num_qubits(),
            got: hamiltonian.num_qubits,
        });
    }
    let eig = hermitian_eigen(&hamiltonian.to_dense()?)?;
    let out = eig.apply_spectral(|l| C64::from_polar(1.0, -tau * l), state.amplitudes());
    StateVector::from_amplitudes(out)
}
