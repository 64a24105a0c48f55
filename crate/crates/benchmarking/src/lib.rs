//! Single-qubit randomized benchmarking with a gate-like pulse embedded after
//! every Clifford.
//!
//! Cliffords are perfect and instantaneous. The embedded pulse is reduced to
//! a qubit channel by evolving the qubit and its heated motional mode, and
//! the motional occupation grows from one Clifford/pulse pair to the next.

mod channel;
mod clifford;
mod rb;

pub use channel::{
    embedded_channel, ms_pulse_channel, ChannelOptions, ChannelResult, Embedded, MsPulse,
    QubitChannel,
};
pub use clifford::CliffordGroup;
pub use rb::{
    draw_sequences, fit_decay, pair_channels, run_rb, run_rb_with_channels, sequence_error,
    write_rb_csv, HeatingModel, PairChannels, RbConfig, RbFit, RbPoint, RbResult, RbScenario,
    RbSequence, AFFINE_TOLERANCE, HEATING_GRID, MAX_LENGTH, MIN_SEEDS, OFFSET_PROBES,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid benchmarking input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Evolve(#[from] lindblad::EvolveError),
    #[error(transparent)]
    Pulse(#[from] pulses::PulseError),
}
