//! Reverse-mode (adjoint) gradients of the negative log-likelihood.
//!
//! The co-state `λ = ∂L/∂ψ*` starts at `λ_{x,a} = −(p(x)/q(x))·ψ_{x,a}` and
//! is carried backwards through the circuit alongside `ψ`. A parameter that
//! enters through a unitary `U` between `ψ_before` and `λ_after` contributes
//! `dL/dθ = 2·Re⟨λ_after| ∂U/∂θ |ψ_before⟩`.

use faer::Mat;

use super::forward::{evolve, layer_eigen, rotate_layer, scrambler_checked};
use super::{Ansatz, ModelSpec, RotationSlot};
use crate::error::{Error, Result};
use crate::metrics::PROB_FLOOR;
use crate::scramblers::CompiledScrambler;
use crate::statevector::{Axis, DenseMatrix, HermitianEigen, StateVector};
use crate::C64;

/// Eigenvalue gap below which the divided difference switches to its
/// diagonal limit.
const DEGENERACY_GAP: f64 = 1e-8;

/// NLL `−Σ_x p(x) ln max(q(x), 10⁻¹²)` and its exact gradient.
pub fn loss_and_gradient(
    model: &ModelSpec,
    params: &[f64],
    scrambler: Option<&CompiledScrambler>,
    target: &[f64],
) -> Result<(f64, Vec<f64>)> {
    model.validate()?;
    model.check_params(params)?;
    if target.len() != model.num_bins() {
        return Err(Error::DimensionMismatch { expected: model.num_bins(), got: target.len() });
    }
    match model.ansatz {
        Ansatz::FixedScrambler { .. } => fixed_scrambler(model, params, scrambler_checked(model, scrambler)?, target),
        Ansatz::TrainableHamiltonian { tau, .. } => trainable_hamiltonian(model, params, tau, target),
    }
}

/// Loss and the seeded co-state for the final state.
fn seed_costate(model: &ModelSpec, psi: &StateVector, target: &[f64]) -> (f64, StateVector) {
    let mask = model.num_bins() - 1;
    let mut q = vec![0.0; model.num_bins()];
    for (x, z) in psi.amplitudes().iter().enumerate() {
        q[x & mask] += z.norm_sqr();
    }
    let mut loss = 0.0;
    let mut weight = vec![0.0; q.len()];
    for ((&p, &qx), w) in target.iter().zip(&q).zip(weight.iter_mut()) {
        if p > 0.0 {
            loss -= p * qx.max(PROB_FLOOR).ln();
            // below the floor the loss is flat in q
            if qx >= PROB_FLOOR {
                *w = -p / qx;
            }
        }
    }
    let lambda: Vec<C64> = psi
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(x, z)| z * weight[x & mask])
        .collect();
    (loss, StateVector::from_amplitudes(lambda).expect("same length as psi"))
}

/// `⟨λ|σ^axis_q|ψ⟩`.
fn pauli_overlap(lambda: &[C64], psi: &[C64], qubit: usize, axis: Axis) -> C64 {
    let stride = 1usize << qubit;
    let mut acc = C64::new(0.0, 0.0);
    for (lb, pb) in lambda.chunks_exact(2 * stride).zip(psi.chunks_exact(2 * stride)) {
        let (l0, l1) = lb.split_at(stride);
        let (p0, p1) = pb.split_at(stride);
        for k in 0..stride {
            acc += match axis {
                Axis::X => l0[k].conj() * p1[k] + l1[k].conj() * p0[k],
                Axis::Y => (l1[k].conj() * p0[k] - l0[k].conj() * p1[k]) * C64::new(0.0, 1.0),
                Axis::Z => l0[k].conj() * p0[k] - l1[k].conj() * p1[k],
            };
        }
    }
    acc
}

fn fixed_scrambler(model: &ModelSpec, params: &[f64], scrambler: &CompiledScrambler, target: &[f64]) -> Result<(f64, Vec<f64>)> {
    let mut psi = super::forward(model, params, Some(scrambler))?;
    let (loss, mut lambda) = seed_costate(model, &psi, target);
    let mut grad = vec![0.0; params.len()];

    // For R = exp(−iθσ/2): 2·Re⟨λ|(−iσ/2)|ψ⟩ = Im⟨λ|σ|ψ⟩ with both vectors
    // taken just after the gate.
    let mut sublayer = |psi: &mut StateVector, lambda: &mut StateVector, layer: usize, slot: RotationSlot, axis: Axis| -> Result<()> {
        for q in 0..model.num_qubits {
            let k = model.rotation_index(layer, q, slot);
            grad[k] = pauli_overlap(lambda.amplitudes(), psi.amplitudes(), q, axis).im;
        }
        rotate_layer(psi, model, params, layer, slot, -1.0)?;
        rotate_layer(lambda, model, params, layer, slot, -1.0)
    };

    for layer in (0..model.num_layers).rev() {
        sublayer(&mut psi, &mut lambda, layer, RotationSlot::YPost, Axis::Y)?;
        scrambler.apply_adjoint(&mut psi)?;
        scrambler.apply_adjoint(&mut lambda)?;
        sublayer(&mut psi, &mut lambda, layer, RotationSlot::ZPre, Axis::Z)?;
        sublayer(&mut psi, &mut lambda, layer, RotationSlot::XPre, Axis::X)?;
    }
    Ok((loss, grad))
}

fn trainable_hamiltonian(model: &ModelSpec, params: &[f64], tau: f64, target: &[f64]) -> Result<(f64, Vec<f64>)> {
    let mut befores = Vec::with_capacity(model.num_layers);
    let mut eigens = Vec::with_capacity(model.num_layers);
    let mut amps = StateVector::zero_state(model.num_qubits)?.into_amplitudes();
    for layer in 0..model.num_layers {
        let eigen = layer_eigen(model, params, layer)?;
        let next = evolve(&eigen, tau, &amps);
        befores.push(std::mem::replace(&mut amps, next));
        eigens.push(eigen);
    }
    let psi = StateVector::from_amplitudes(amps)?;
    let (loss, lambda) = seed_costate(model, &psi, target);
    let mut lambda = lambda.into_amplitudes();
    let mut grad = vec![0.0; params.len()];

    for layer in (0..model.num_layers).rev() {
        let eigen = &eigens[layer];
        let w = FrechetPairing::new(eigen, tau, &befores[layer], &lambda);
        let n = model.num_qubits;
        // ∂H/∂J = −Σ X_i X_{i+1}; ∂H/∂h_{α,i} = −σ^α_i
        let mut gj = C64::new(0.0, 0.0);
        for i in 0..n - 1 {
            gj += w.flip_sum((1 << i) | (1 << (i + 1)), |_| C64::new(1.0, 0.0));
        }
        grad[model.coupling_index(layer)] = -2.0 * gj.re;
        for i in 0..n {
            let m = 1usize << i;
            let gx = w.flip_sum(m, |_| C64::new(1.0, 0.0));
            // ⟨x|Y_i|x⊕m⟩ = i when bit i of x is 1, −i when it is 0
            let gy = w.flip_sum(m, |x| if x & m != 0 { C64::new(0.0, 1.0) } else { C64::new(0.0, -1.0) });
            let gz = w.diagonal_sum(|x| if x & m != 0 { -1.0 } else { 1.0 });
            grad[model.field_index(layer, i, Axis::X)] = -2.0 * gx.re;
            grad[model.field_index(layer, i, Axis::Y)] = -2.0 * gy.re;
            grad[model.field_index(layer, i, Axis::Z)] = -2.0 * gz.re;
        }
        lambda = evolve(eigen, -tau, &lambda);
    }
    Ok((loss, grad))
}

/// Pairing `E ↦ ⟨λ| D exp(−iτH)[E] |ψ⟩ = Σ_{mn} E_mn W_mn` for one layer.
///
/// With `H = V diag(d) V†`, `a = V†ψ`, `b = V†λ` and the divided-difference
/// kernel `Φ_jk = (e^{−iτd_j} − e^{−iτd_k})/(d_j − d_k)` (diagonal limit
/// `−iτ e^{−iτd_j}`), the weight matrix is `W = conj(V) M Vᵀ` with
/// `M_jk = conj(b_j) Φ_jk a_k`.
struct FrechetPairing {
    w: DenseMatrix,
}

impl FrechetPairing {
    fn new(eigen: &HermitianEigen, tau: f64, psi_before: &[C64], lambda_after: &[C64]) -> Self {
        let v = &eigen.vectors;
        let d = &eigen.values;
        let dim = v.dim();
        let mut a = vec![C64::new(0.0, 0.0); dim];
        let mut b = vec![C64::new(0.0, 0.0); dim];
        v.adjoint_matvec_into(psi_before, &mut a);
        v.adjoint_matvec_into(lambda_after, &mut b);
        let phase: Vec<C64> = d.iter().map(|&x| C64::from_polar(1.0, -tau * x)).collect();
        let m = Mat::from_fn(dim, dim, |j, k| {
            let gap = d[j] - d[k];
            let phi = if gap.abs() < DEGENERACY_GAP {
                C64::new(0.0, -tau) * phase[j]
            } else {
                (phase[j] - phase[k]) / gap
            };
            b[j].conj() * phi * a[k]
        });
        let vf = v.to_faer();
        let w = vf.conjugate() * (m * vf.transpose());
        Self { w: DenseMatrix::from_faer(w.as_ref()) }
    }

    /// `Σ_x c(x)·W_{x, x⊕mask}`.
    fn flip_sum(&self, mask: usize, coeff: impl Fn(usize) -> C64) -> C64 {
        (0..self.w.dim()).map(|x| coeff(x) * self.w.get(x, x ^ mask)).sum()
    }

    /// `Σ_x c(x)·W_{x,x}`.
    fn diagonal_sum(&self, coeff: impl Fn(usize) -> f64) -> C64 {
        (0..self.w.dim()).map(|x| self.w.get(x, x) * coeff(x)).sum()
    }
}
