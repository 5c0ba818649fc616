use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator, trainer and sweep harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded: {what} (got {got}, limit {limit})")]
    Capacity {
        what: &'static str,
        got: usize,
        limit: usize,
    },
    #[error("qubit index {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("qubit {0} used twice in one gate")]
    DuplicateQubit(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not Hermitian (‖H − H†‖_F = {0:.3e})")]
    NotHermitian(f64),
    #[error("eigendecomposition failed to converge")]
    EigenFailure,
    #[error("expected {expected} parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },
    #[error("the fixed-scrambler model needs a compiled scrambler")]
    MissingScrambler,
    #[error("non-finite gradient at epoch {epoch} (component {index})")]
    NonFiniteGradient { epoch: usize, index: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid config at line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("results schema mismatch in {path}: expected {expected}, found {found}")]
    Schema {
        path: PathBuf,
        expected: String,
        found: String,
    },
    #[error("output directory {0} already holds results; pass --resume to continue it")]
    PartialOutput(PathBuf),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
