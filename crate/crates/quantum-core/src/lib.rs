//! Dense complex operators and quantum states on a `qubit ⊗ motion` Hilbert space.
//!
//! Composite indices are ordered qubit-major: basis state `|q⟩|n⟩` sits at
//! `q * fock_dim + n`. The "qubit" factor may hold more than one qubit
//! (dimension 4 for a pair), in which case it is itself ordered with the first
//! qubit most significant.

mod linalg;
mod operator;
mod state;

pub use linalg::{
    eigh, expm_hermitian, expm_minus_i, frobenius_norm, is_hermitian, max_abs, trace_distance,
    unitary_defect,
};
pub use operator::{
    commutator, dagger, fock_operators, identity, kron, pauli, sigma_minus, sigma_plus, Dims,
    FockOperators, OperatorMatrix, Pauli,
};
pub use state::{
    coherent_state, number_state, partial_trace_motion, purity, qubit_purity, thermal_state,
    CoherentAmplitude, DensityMatrix, TruncationWarning,
};

use thiserror::Error;

/// Complex scalar used throughout the workspace.
pub type C64 = num_complex::Complex64;

/// Shorthand for a complex number from its real and imaginary parts.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("invalid dimension {0}: a truncated oscillator needs at least 2 levels")]
    InvalidDimension(usize),
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("thermal occupation must be non-negative, got {0}")]
    NegativeOccupation(f64),
    #[error("not a valid density matrix: {0}")]
    InvalidState(String),
}
