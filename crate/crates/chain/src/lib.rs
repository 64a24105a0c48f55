//! Addressing ion pairs in a chain above parallel microwave electrodes.
//!
//! For a chosen pair the sideband currents are solved so that both ions see
//! the same gradient, and the DD currents so that the DD is in phase with the
//! gradient at the pair and (nearly) in quadrature everywhere else. The
//! leftover in-phase force at the other ions sets the crosstalk.

mod crosstalk;
mod gate;
mod optimize;
mod spec;

pub use crosstalk::{
    chain_crosstalk_map, crosstalk, magnus_unitary, pair_crosstalk, spectator_impurity,
    write_pair_matrix_csv, CrosstalkReport, PairCrosstalk, PairMetric,
};
pub use gate::{
    addressed_ion_drive, gate_error_sweep, gate_error_vs_position, gate_error_with, ideal_gate,
    magnus_dynamics_distance, GateIon, GateOptions, GateOutcome, PairDrive,
};
pub use optimize::{
    ion_drives, optimize_currents, residual_strength, AddressingSolution, IonDrive,
    ResidualStrength, DD_PHASE_OFFSET, SOLVER_TOLERANCE,
};
pub use spec::{ChainSpec, GateSettings, BOHR_RABI_PER_TESLA};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChainError {
    #[error("invalid chain specification: {0}")]
    InvalidSpec(String),
    #[error("invalid pair ({i}, {j}) for a chain of {n} ions")]
    InvalidPair { i: usize, j: usize, n: usize },
    #[error("degenerate addressing problem: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Field(#[from] fieldmodel::FieldError),
    #[error(transparent)]
    Evolve(#[from] lindblad::EvolveError),
    #[error(transparent)]
    Pulse(#[from] pulses::PulseError),
}
