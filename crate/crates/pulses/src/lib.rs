//! Walsh phase patterns and ramped pulse schedules.
//!
//! A schedule is a list of non-overlapping segments. Inside a segment the DD
//! envelope ramps up first, then the sideband envelope; on the way down the
//! order reverses, so the DD is always fully on while sidebands are on.

mod schedule;
mod text;
mod walsh;

pub use schedule::{
    build_schedule, envelope, sin2_ramp, DriveTone, PulseSchedule, Ramp, Segment, ToneRole,
};
pub use text::{parse_schedule, write_schedule};
pub use walsh::{walsh_signs, WalshSequence, SUPPORTED_ORDERS};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PulseError {
    #[error("unsupported Walsh order {0} (supported: 0, 1, 3, 7, 15)")]
    InvalidOrder(u32),
    #[error("infeasible schedule: {0}")]
    Infeasible(String),
    #[error("schedule parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
