//! Microwave field of infinite straight wires running along z, evaluated at
//! an ion a height `h` above the wire plane.
//!
//! Only the x component of the field drives the qubit. Positions are in
//! metres, currents are complex phasors in amperes.

mod geometry;
mod profile;
mod zone;

pub use geometry::{
    field_at, field_at_mode, zero_point_amplitude, FieldSample, TiltProfile, TrapGeometry, Wire, MU0_OVER_2PI,
};
pub use profile::{phase_profile, unwrap_phases, write_profile_csv, PhaseProfile};
pub use zone::{interaction_zone, predicted_p0, threshold_intervals, ZoneModel};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("ion at x = {x:e} m coincides with a wire")]
    SingularPosition { x: f64 },
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
