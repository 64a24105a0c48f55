use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::HamiltonianError;

/// Reduce an angle to `(−π, π]`.
pub fn reduce_phase(phi: f64) -> f64 {
    let mut r = phi.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// Drive parameters at one ion. Rates in rad/s, phases in rad.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    /// Sideband interaction strength `Ω_SB = ηΩ`.
    pub omega_sb: f64,
    /// DD Rabi rate.
    pub omega_dd: f64,
    /// Symmetric sideband detuning `δ`.
    pub delta: f64,
    pub phi_dd: f64,
    pub phi_field: f64,
    pub phi_grad: f64,
    /// Effective Lamb-Dicke parameter `u_zpf |∂B| / |B|`.
    pub eta: f64,
}

impl Default for DriveParams {
    fn default() -> Self {
        Self {
            omega_sb: 0.0,
            omega_dd: 0.0,
            delta: 0.0,
            phi_dd: 0.0,
            phi_field: 0.0,
            phi_grad: 0.0,
            eta: 0.0,
        }
    }
}

impl DriveParams {
    /// Checks the invariants and reduces all phases to `(−π, π]`.
    pub fn validated(mut self) -> Result<Self, HamiltonianError> {
        for (name, v) in [
            ("omega_sb", self.omega_sb),
            ("omega_dd", self.omega_dd),
            ("delta", self.delta),
            ("phi_dd", self.phi_dd),
            ("phi_field", self.phi_field),
            ("phi_grad", self.phi_grad),
            ("eta", self.eta),
        ] {
            if !v.is_finite() {
                return Err(HamiltonianError::InvalidParameter(format!(
                    "{name} is not finite"
                )));
            }
        }
        if self.omega_sb < 0.0 || self.omega_dd < 0.0 {
            return Err(HamiltonianError::InvalidParameter(
                "Rabi rates must be non-negative".into(),
            ));
        }
        if self.eta < 0.0 {
            return Err(HamiltonianError::InvalidParameter(
                "eta must be non-negative".into(),
            ));
        }
        self.phi_dd = reduce_phase(self.phi_dd);
        self.phi_field = reduce_phase(self.phi_field);
        self.phi_grad = reduce_phase(self.phi_grad);
        Ok(self)
    }

    /// Carrier Rabi rate `Ω = Ω_SB / η` behind the off-resonant term.
    pub fn carrier_rabi(&self) -> Result<f64, HamiltonianError> {
        if self.eta <= 0.0 {
            return Err(HamiltonianError::InvalidParameter(
                "eta must be positive for the off-resonant carrier".into(),
            ));
        }
        Ok(self.omega_sb / self.eta)
    }
}

/// A spectator hyperfine transition seen by the drive tones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectatorTransition {
    /// Signed detuning from the qubit transition (rad/s).
    pub detuning: f64,
    /// Coupling relative to the qubit carrier.
    pub rabi_ratio: f64,
}

impl SpectatorTransition {
    pub fn new(detuning: f64, rabi_ratio: f64) -> Result<Self, HamiltonianError> {
        if detuning == 0.0 || !detuning.is_finite() {
            return Err(HamiltonianError::InvalidParameter(
                "spectator detuning must be non-zero".into(),
            ));
        }
        Ok(Self {
            detuning,
            rabi_ratio,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phases_land_in_half_open_interval() {
        assert_eq!(reduce_phase(PI), PI);
        assert!((reduce_phase(-PI) - PI).abs() < 1e-15);
        assert!((reduce_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(reduce_phase(0.25), 0.25);
    }

    #[test]
    fn rejects_negative_rates_and_zero_detuning() {
        let p = DriveParams {
            omega_sb: -1.0,
            ..Default::default()
        };
        assert!(p.validated().is_err());
        assert!(SpectatorTransition::new(0.0, 1.0).is_err());
        assert!(DriveParams::default().carrier_rabi().is_err());
    }
}
