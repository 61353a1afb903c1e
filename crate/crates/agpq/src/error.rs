//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AgpqError {
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    IndexOutOfRange { index: usize, num_qubits: usize },

    #[error("size mismatch: operator on {op_qubits} qubits applied to state on {state_qubits}")]
    SizeMismatch {
        op_qubits: usize,
        state_qubits: usize,
    },

    #[error("sector dimension C({m},{n}) = {dim} exceeds limit {limit}")]
    DimensionLimit {
        m: usize,
        n: usize,
        dim: u128,
        limit: u128,
    },

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("convergence failure: {0}")]
    ConvergenceFailure(String),

    #[error("observable is not Hermitian (term `{0}` has complex coefficient)")]
    NonHermitianObservable(String),

    #[error("observable breaks pair-number symmetry: {0}")]
    SymmetryBrokenObservable(String),

    #[error("numerical check failed: {0}")]
    NumericalCheck(String),

    #[error("correlation energy denominator vanishes (|E_exact - E_HF| < 1e-12)")]
    ZeroCorrelation,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, AgpqError>;
