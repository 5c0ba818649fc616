//! Quantum scrambling Born machines.
//!
//! A Born machine prepares `|ψ(θ)⟩` from `|0…0⟩` with `L` layers of
//! single-qubit rotations wrapped around a fixed entangling unitary (the
//! scrambler), traces out `N_A` ancilla qubits and reads the remaining
//! register in the computational basis. This crate provides the exact
//! statevector substrate, the three scrambler families (Haar, brickwork,
//! analog spin-chain evolution), adjoint gradients of the negative
//! log-likelihood, Adam training, an RBM baseline and a sweep harness that
//! writes CSV/JSON results.
//!
//! ```
//! use qsbm::statevector::StateVector;
//! use qsbm::scramblers::page_entropy;
//!
//! let psi = StateVector::zero_state(4).unwrap();
//! assert_eq!(psi.full_probabilities()[0], 1.0);
//! assert!(page_entropy(4, 4).unwrap() < 4f64.ln());
//! ```

pub mod born;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod rbm;
pub mod rng;
pub mod scramblers;
pub mod statevector;
pub mod targets;
pub mod training;

pub use error::{Error, Result};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;
