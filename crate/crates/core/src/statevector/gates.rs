//! Fixed-size gate matrices.
//!
//! Rotations follow `R_α(θ) = exp(−iθσ_α/2)`. Two-qubit gates act on the
//! local basis `|a b⟩` with index `2·bit(a) + bit(b)`, where `a` is the
//! first qubit passed to [`StateVector::apply_two_qubit_gate`].
//!
//! [`StateVector::apply_two_qubit_gate`]: super::StateVector::apply_two_qubit_gate

use std::f64::consts::FRAC_1_SQRT_2;

use crate::C64;

pub type Gate1 = [[C64; 2]; 2];
pub type Gate2 = [[C64; 4]; 4];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Single-qubit Pauli axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[derive(serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

pub fn pauli(axis: Axis) -> Gate1 {
    match axis {
        Axis::X => [[ZERO, ONE], [ONE, ZERO]],
        Axis::Y => [[ZERO, -I], [I, ZERO]],
        Axis::Z => [[ONE, ZERO], [ZERO, -ONE]],
    }
}

pub fn rotation(axis: Axis, theta: f64) -> Gate1 {
    let (s, c) = (0.5 * theta).sin_cos();
    let c = C64::new(c, 0.0);
    match axis {
        Axis::X => [[c, C64::new(0.0, -s)], [C64::new(0.0, -s), c]],
        Axis::Y => [[c, C64::new(-s, 0.0)], [C64::new(s, 0.0), c]],
        Axis::Z => [
            [C64::from_polar(1.0, -0.5 * theta), ZERO],
            [ZERO, C64::from_polar(1.0, 0.5 * theta)],
        ],
    }
}

pub fn hadamard() -> Gate1 {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

pub fn identity4() -> Gate2 {
    let mut g = [[ZERO; 4]; 4];
    for (k, row) in g.iter_mut().enumerate() {
        row[k] = ONE;
    }
    g
}

/// Controlled-NOT with the first qubit as control.
pub fn cnot() -> Gate2 {
    let mut g = identity4();
    g[2] = [ZERO, ZERO, ZERO, ONE];
    g[3] = [ZERO, ZERO, ONE, ZERO];
    g
}

pub fn swap() -> Gate2 {
    let mut g = [[ZERO; 4]; 4];
    g[0][0] = ONE;
    g[1][2] = ONE;
    g[2][1] = ONE;
    g[3][3] = ONE;
    g
}

pub fn adjoint1(g: &Gate1) -> Gate1 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = g[j][i].conj();
        }
    }
    out
}

pub fn adjoint2(g: &Gate2) -> Gate2 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = g[j][i].conj();
        }
    }
    out
}
