//! Master-equation evolution of a driven qubit register sharing one heated
//! motional mode.
//!
//! The Hamiltonian is kept in the structured form
//! `H(t) = B(t)⊗1 + L(t)⊗a + L(t)†⊗a†` (see [`hamiltonians::SpinBosonTerms`]),
//! which lets the right-hand side run in `O(d²N²)` without building dense
//! operators. Heating is the symmetric pair of dissipators `ṅ̄(D[a] + D[a†])`.
//!
//! Integration is adaptive (Dormand–Prince 5(4)) and restarted at every
//! schedule event, so Walsh phase flips and ramp corners are never stepped
//! across.

mod analytic;
mod drive;
mod evolve;
mod export;
mod mode;
mod rhs;
mod scan;

pub use analytic::{
    heating_decoherence_exponent, p0_analytic, p0_analytic_thermal, sdd_amplitude,
    time_for_p0,
};
pub use drive::{Drive, DriveOptions, SingleIonDrive};
pub use evolve::{
    evolve, evolve_guarded, evolve_with, initial_state, EvolutionResult, EvolveOptions,
    IntegratorStats, Sample, GUARD_TOLERANCE,
};
pub use export::{summary_json, write_csv, EvolutionSummary};
pub use mode::MotionalMode;
pub use rhs::{dense_generator, master_rhs};
pub use scan::{suppression_error_scan, ScanPoint, SuppressionScenario};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("integrator failed at t = {t:e} s: {msg}")]
    Integrator { t: f64, msg: String },
    #[error(
        "Fock truncation not converged: {observable} changed by {deviation:e} \
         when fock_dim went {fock_dim} -> {doubled}"
    )]
    Convergence {
        observable: String,
        deviation: f64,
        fock_dim: usize,
        doubled: usize,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Quantum(#[from] quantum_core::QuantumError),
    #[error(transparent)]
    Hamiltonian(#[from] hamiltonians::HamiltonianError),
    #[error(transparent)]
    Pulse(#[from] pulses::PulseError),
}
