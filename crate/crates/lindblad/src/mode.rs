use serde::{Deserialize, Serialize};

use crate::EvolveError;

/// One motional mode: frequency, initial thermal occupation, heating rate,
/// zero-point amplitude and the tilt of its axis in the trap plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionalMode {
    /// Angular frequency (rad/s).
    pub omega_m: f64,
    pub n_bar: f64,
    /// Quanta per second.
    pub heating_rate: f64,
    /// Metres.
    pub u_zpf: f64,
    /// Radians from the x axis.
    pub tilt_theta: f64,
}

impl MotionalMode {
    /// Ground-state, heating-free mode.
    pub fn cold(omega_m: f64, u_zpf: f64) -> Self {
        Self {
            omega_m,
            n_bar: 0.0,
            heating_rate: 0.0,
            u_zpf,
            tilt_theta: 0.0,
        }
    }

    pub fn with_n_bar(mut self, n_bar: f64) -> Self {
        self.n_bar = n_bar;
        self
    }

    pub fn with_heating(mut self, rate: f64) -> Self {
        self.heating_rate = rate;
        self
    }

    pub fn validate(&self) -> Result<(), EvolveError> {
        let bad = |m: &str| Err(EvolveError::InvalidInput(m.into()));
        if !(self.omega_m > 0.0) {
            return bad("mode frequency must be positive");
        }
        if !(self.n_bar >= 0.0) || !(self.heating_rate >= 0.0) {
            return bad("occupation and heating rate must be non-negative");
        }
        if !(self.u_zpf > 0.0) {
            return bad("zero-point amplitude must be positive");
        }
        Ok(())
    }
}
