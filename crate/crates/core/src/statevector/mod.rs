//! Exact statevector simulation.
//!
//! Basis index `x` stores qubit `i` in bit `i`; qubit 0 is the least
//! significant bit. All entropies are in nats.

pub mod gates;
mod haar;
pub mod linalg;
mod sampling;

pub use gates::{Axis, Gate1, Gate2};
pub use haar::haar_unitary;
pub use linalg::{hermitian_eigen, DenseMatrix, HermitianEigen, MAX_DENSE_DIM};
pub use sampling::sample_counts;

use crate::error::{Error, Result};
use crate::C64;

/// Hard cap on register size.
pub const MAX_QUBITS: usize = 14;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0…0⟩` on `num_qubits` qubits.
    pub fn zero_state(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::Capacity {
                what: "qubit count",
                got: num_qubits,
                limit: MAX_QUBITS,
            });
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    /// Wraps raw amplitudes. The length must be a power of two; no
    /// normalization is applied.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude vector length {len} is not a power of two ≥ 2"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::Capacity {
                what: "qubit count",
                got: num_qubits,
                limit: MAX_QUBITS,
            });
        }
        Ok(Self { num_qubits, amps })
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    pub fn apply_single_qubit_gate(&mut self, qubit: usize, gate: &Gate1) -> Result<()> {
        self.check_qubit(qubit)?;
        apply_gate1(&mut self.amps, qubit, gate);
        Ok(())
    }

    pub fn apply_two_qubit_gate(&mut self, qubit_a: usize, qubit_b: usize, gate: &Gate2) -> Result<()> {
        self.check_qubit(qubit_a)?;
        self.check_qubit(qubit_b)?;
        if qubit_a == qubit_b {
            return Err(Error::DuplicateQubit(qubit_a));
        }
        apply_gate2(&mut self.amps, qubit_a, qubit_b, gate);
        Ok(())
    }

    /// `ψ ← Uψ` for a full-register unitary.
    pub fn apply_dense_unitary(&mut self, unitary: &DenseMatrix) -> Result<()> {
        self.check_dense(unitary)?;
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        unitary.matvec_into(&self.amps, &mut out);
        self.amps = out;
        Ok(())
    }

    /// `ψ ← U†ψ`.
    pub fn apply_dense_adjoint(&mut self, unitary: &DenseMatrix) -> Result<()> {
        self.check_dense(unitary)?;
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        unitary.adjoint_matvec_into(&self.amps, &mut out);
        self.amps = out;
        Ok(())
    }

    fn check_dense(&self, unitary: &DenseMatrix) -> Result<()> {
        if unitary.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: unitary.dim(),
            });
        }
        Ok(())
    }

    /// Born probabilities `|ψ_x|²` over all qubits.
    pub fn full_probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Born probabilities of the register left after tracing out `ancillas`.
    /// The remaining qubits keep their relative order, lowest first.
    pub fn marginal_probabilities(&self, ancillas: &[usize]) -> Result<Vec<f64>> {
        let kept = self.complement(ancillas)?;
        if kept.is_empty() {
            return Err(Error::InvalidArgument("cannot trace out every qubit".into()));
        }
        let mut out = vec![0.0; 1 << kept.len()];
        if is_low_prefix(&kept) {
            let mask = (1usize << kept.len()) - 1;
            for (x, z) in self.amps.iter().enumerate() {
                out[x & mask] += z.norm_sqr();
            }
        } else {
            for (x, z) in self.amps.iter().enumerate() {
                out[gather_bits(x, &kept)] += z.norm_sqr();
            }
        }
        Ok(out)
    }

    /// Reduced density matrix on `kept` (sorted ascending internally; bit `k`
    /// of the row index is the `k`-th smallest kept qubit).
    pub fn reduced_density_matrix(&self, kept: &[usize]) -> Result<ReducedDensityMatrix> {
        let mut kept_sorted = kept.to_vec();
        kept_sorted.sort_unstable();
        kept_sorted.dedup();
        if kept_sorted.len() != kept.len() {
            return Err(Error::DuplicateQubit(kept[0]));
        }
        for &q in &kept_sorted {
            self.check_qubit(q)?;
        }
        if kept_sorted.is_empty() || kept_sorted.len() == self.num_qubits {
            return Err(Error::InvalidArgument(
                "kept set must be a nonempty proper subset".into(),
            ));
        }
        let env: Vec<usize> = (0..self.num_qubits)
            .filter(|q| !kept_sorted.contains(q))
            .collect();
        let dk = 1usize << kept_sorted.len();
        let de = 1usize << env.len();
        // psi_mat[k][e]
        let mut psi = vec![C64::new(0.0, 0.0); dk * de];
        for (x, z) in self.amps.iter().enumerate() {
            psi[gather_bits(x, &kept_sorted) * de + gather_bits(x, &env)] = *z;
        }
        let mut rho = DenseMatrix::zeros(dk);
        for i in 0..dk {
            let ri = &psi[i * de..(i + 1) * de];
            for j in i..dk {
                let rj = &psi[j * de..(j + 1) * de];
                let v: C64 = ri.iter().zip(rj).map(|(a, b)| a * b.conj()).sum();
                rho.set(i, j, v);
                if i != j {
                    rho.set(j, i, v.conj());
                }
            }
        }
        Ok(ReducedDensityMatrix {
            kept_qubits: kept_sorted,
            matrix: rho,
        })
    }

    /// Entropy of the lower half `0..N/2` of the register.
    pub fn half_chain_entropy(&self) -> Result<f64> {
        let kept: Vec<usize> = (0..self.num_qubits / 2).collect();
        Ok(self.reduced_density_matrix(&kept)?.von_neumann_entropy())
    }

    fn complement(&self, ancillas: &[usize]) -> Result<Vec<usize>> {
        for &q in ancillas {
            self.check_qubit(q)?;
        }
        Ok((0..self.num_qubits)
            .filter(|q| !ancillas.contains(q))
            .collect())
    }
}

fn is_low_prefix(kept: &[usize]) -> bool {
    kept.iter().enumerate().all(|(k, &q)| k == q)
}

#[inline]
fn gather_bits(x: usize, qubits: &[usize]) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &q)| acc | (((x >> q) & 1) << k))
}

pub(crate) fn apply_gate1(amps: &mut [C64], qubit: usize, g: &Gate1) {
    let stride = 1usize << qubit;
    let [[g00, g01], [g10, g11]] = *g;
    for block in amps.chunks_exact_mut(2 * stride) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x0, x1) = (*a, *b);
            *a = g00 * x0 + g01 * x1;
            *b = g10 * x0 + g11 * x1;
        }
    }
}

pub(crate) fn apply_gate2(amps: &mut [C64], qa: usize, qb: usize, g: &Gate2) {
    let (ma, mb) = (1usize << qa, 1usize << qb);
    let both = ma | mb;
    for i0 in 0..amps.len() {
        if i0 & both != 0 {
            continue;
        }
        let idx = [i0, i0 | mb, i0 | ma, i0 | both];
        let x = idx.map(|k| amps[k]);
        for (r, &k) in idx.iter().enumerate() {
            amps[k] = g[r][0] * x[0] + g[r][1] * x[1] + g[r][2] * x[2] + g[r][3] * x[3];
        }
    }
}

/// Reduced state of a subset of qubits.
#[derive(Clone, Debug)]
pub struct ReducedDensityMatrix {
    pub kept_qubits: Vec<usize>,
    pub matrix: DenseMatrix,
}

impl ReducedDensityMatrix {
    pub fn num_kept_qubits(&self) -> usize {
        self.kept_qubits.len()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix)
            .map(|e| e.values)
            .expect("density matrices are Hermitian by construction")
    }

    /// `−Σ λ ln λ` with eigenvalues clamped to `[0, 1]` and `0·ln 0 = 0`.
    pub fn von_neumann_entropy(&self) -> f64 {
        entropy_of_spectrum(&self.eigenvalues())
    }

    pub fn trace(&self) -> f64 {
        (0..self.matrix.dim()).map(|i| self.matrix.get(i, i).re).sum()
    }
}

pub(crate) fn entropy_of_spectrum(values: &[f64]) -> f64 {
    values
        .iter()
        .map(|&l| l.clamp(0.0, 1.0))
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.ln())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::gates::*;
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn ghz(n: usize) -> StateVector {
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        amps[0] = c(FRAC_1_SQRT_2, 0.0);
        amps[(1 << n) - 1] = c(FRAC_1_SQRT_2, 0.0);
        StateVector::from_amplitudes(amps).unwrap()
    }

    #[test]
    fn zero_state_layout_and_cap() {
        let s = StateVector::zero_state(1).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        let s = StateVector::zero_state(3).unwrap();
        assert_eq!(s.dim(), 8);
        assert_eq!(s.amplitudes()[0], c(1.0, 0.0));
        assert!(matches!(StateVector::zero_state(15), Err(Error::Capacity { .. })));
        assert!(StateVector::zero_state(0).is_err());
    }

    #[test]
    fn single_qubit_gate_examples() {
        let mut s = StateVector::zero_state(1).unwrap();
        s.apply_single_qubit_gate(0, &rotation(Axis::Y, PI)).unwrap();
        assert!(s.amplitudes()[0].norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(1.0, 0.0)).norm() < 1e-15);

        let mut s = StateVector::zero_state(1).unwrap();
        s.apply_single_qubit_gate(0, &rotation(Axis::Z, 0.77)).unwrap();
        assert_eq!(s.full_probabilities(), vec![1.0, 0.0]);

        let mut s = StateVector::zero_state(2).unwrap();
        s.apply_single_qubit_gate(1, &hadamard()).unwrap();
        let a = s.amplitudes();
        assert!((a[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((a[2] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!(a[1].norm() < 1e-15 && a[3].norm() < 1e-15);

        assert!(matches!(
            s.apply_single_qubit_gate(2, &hadamard()),
            Err(Error::QubitOutOfRange { .. })
        ));
    }

    #[test]
    fn two_qubit_gate_examples() {
        let mut s = StateVector::zero_state(2).unwrap();
        s.apply_single_qubit_gate(0, &hadamard()).unwrap();
        s.apply_two_qubit_gate(0, 1, &cnot()).unwrap();
        let p = s.full_probabilities();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[3] - 0.5).abs() < 1e-15);

        let before = s.clone();
        s.apply_two_qubit_gate(1, 0, &identity4()).unwrap();
        assert_eq!(before, s);

        // |01⟩ in ket order |q1 q0⟩ is index 1 (qubit 0 set)
        let mut amps = vec![c(0.0, 0.0); 4];
        amps[1] = c(1.0, 0.0);
        let mut s = StateVector::from_amplitudes(amps).unwrap();
        s.apply_two_qubit_gate(0, 1, &swap()).unwrap();
        assert_eq!(s.amplitudes()[2], c(1.0, 0.0));

        assert!(matches!(
            s.apply_two_qubit_gate(1, 1, &swap()),
            Err(Error::DuplicateQubit(1))
        ));
        assert!(s.apply_two_qubit_gate(0, 5, &swap()).is_err());
    }

    #[test]
    fn dense_unitary_roundtrip_and_column() {
        let mut rng = crate::rng::RandomStream::new(5);
        let u = haar_unitary(8, &mut rng);
        let mut s = StateVector::zero_state(3).unwrap();
        s.apply_dense_unitary(&u).unwrap();
        for (k, z) in s.amplitudes().iter().enumerate() {
            assert_eq!(*z, u.get(k, 0));
        }
        s.apply_dense_adjoint(&u).unwrap();
        assert!((s.amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-10);
        assert!(s.amplitudes()[1..].iter().all(|z| z.norm() < 1e-10));

        let mut s2 = StateVector::zero_state(2).unwrap();
        assert!(matches!(
            s2.apply_dense_unitary(&u),
            Err(Error::DimensionMismatch { .. })
        ));
        let before = s2.clone();
        s2.apply_dense_unitary(&DenseMatrix::identity(4)).unwrap();
        assert_eq!(before, s2);
    }

    #[test]
    fn probability_examples() {
        let mut s = StateVector::zero_state(1).unwrap();
        s.apply_single_qubit_gate(0, &pauli(Axis::X)).unwrap();
        assert_eq!(s.full_probabilities(), vec![0.0, 1.0]);
        let mut s = StateVector::zero_state(1).unwrap();
        s.apply_single_qubit_gate(0, &hadamard()).unwrap();
        let p = s.full_probabilities();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        let p = ghz(3).full_probabilities();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[7] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn marginal_examples() {
        let g = ghz(3);
        assert_eq!(g.marginal_probabilities(&[]).unwrap(), g.full_probabilities());
        let m = g.marginal_probabilities(&[2]).unwrap();
        let expect = [0.5, 0.0, 0.0, 0.5];
        for (a, b) in m.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        // product state: system qubits 0,1 in |+⟩|1⟩, ancilla qubit 2 in R_y(0.4)|0⟩
        let mut s = StateVector::zero_state(3).unwrap();
        s.apply_single_qubit_gate(0, &hadamard()).unwrap();
        s.apply_single_qubit_gate(1, &pauli(Axis::X)).unwrap();
        s.apply_single_qubit_gate(2, &rotation(Axis::Y, 0.4)).unwrap();
        let m = s.marginal_probabilities(&[2]).unwrap();
        let expect = [0.0, 0.0, 0.5, 0.5];
        for (a, b) in m.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(s.marginal_probabilities(&[3]).is_err());
    }

    #[test]
    fn rdm_examples() {
        let mut s = StateVector::zero_state(2).unwrap();
        s.apply_single_qubit_gate(0, &rotation(Axis::X, 0.3)).unwrap();
        let r = s.reduced_density_matrix(&[0]).unwrap();
        let ev = r.eigenvalues();
        assert!(ev[0].abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
        assert!(r.von_neumann_entropy().abs() < 1e-10);

        let mut bell = StateVector::zero_state(2).unwrap();
        bell.apply_single_qubit_gate(0, &hadamard()).unwrap();
        bell.apply_two_qubit_gate(0, 1, &cnot()).unwrap();
        let r = bell.reduced_density_matrix(&[1]).unwrap();
        assert!((r.matrix.get(0, 0).re - 0.5).abs() < 1e-15);
        assert!(r.matrix.get(0, 1).norm() < 1e-15);
        assert!((r.von_neumann_entropy() - LN_2).abs() < 1e-12);

        let r = ghz(3).reduced_density_matrix(&[0, 1]).unwrap();
        assert!((r.matrix.get(0, 0).re - 0.5).abs() < 1e-15);
        assert!((r.matrix.get(3, 3).re - 0.5).abs() < 1e-15);
        assert!(r.matrix.get(0, 3).norm() < 1e-15);
        assert!((r.von_neumann_entropy() - LN_2).abs() < 1e-12);

        assert!(ghz(3).reduced_density_matrix(&[]).is_err());
        assert!(ghz(3).reduced_density_matrix(&[0, 1, 2]).is_err());
    }

    #[test]
    fn maximally_mixed_entropies() {
        assert!((entropy_of_spectrum(&[0.5, 0.5]) - LN_2).abs() < 1e-15);
        assert!((entropy_of_spectrum(&[0.25; 4]) - 4f64.ln()).abs() < 1e-15);
        assert_eq!(entropy_of_spectrum(&[-1e-11, 1.0]), 0.0);
    }
}
