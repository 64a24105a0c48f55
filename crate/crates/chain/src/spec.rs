use std::f64::consts::PI;

use fieldmodel::{TrapGeometry, Wire};
use lindblad::MotionalMode;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::ChainError;

/// `μ_B/ħ` in rad/s per tesla; converts field amplitude to Rabi rate.
pub const BOHR_RABI_PER_TESLA: f64 = 8.794_100_8e10;

/// Settings of the two-qubit gate driven on an addressed pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateSettings {
    /// Seconds.
    pub duration: f64,
    /// Number of phase-space loops; the detuning is `2π·loops/duration`.
    pub loops: u32,
    pub walsh_order: u32,
}

impl Default for GateSettings {
    fn default() -> Self {
        Self {
            duration: 250e-6,
            loops: 1,
            walsh_order: 15,
        }
    }
}

impl GateSettings {
    pub fn delta(&self) -> f64 {
        2.0 * PI * self.loops as f64 / self.duration
    }

    /// Sideband strength that gives a maximally entangling gate:
    /// `Ω_SB = δ/(2√loops)`.
    pub fn omega_sb(&self) -> f64 {
        self.delta() / (2.0 * (self.loops as f64).sqrt())
    }
}

/// A linear chain of equally spaced ions above parallel microwave electrodes
/// running perpendicular to the chain.
///
/// Electrode `central_electrode` carries its current with phase `π + ε`,
/// all others with phase 0; the solver only picks real amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n_ions: usize,
    /// Metres.
    pub spacing: f64,
    /// Metres.
    pub ion_height: f64,
    /// Electrode positions along the chain axis (metres).
    pub electrodes: Vec<f64>,
    pub central_electrode: usize,
    /// Phase offset of the central current from π (radians).
    pub epsilon: f64,
    /// Axial mode shared by the addressed pair.
    pub mode: MotionalMode,
    /// Smallest `Ω_DD/Ω_SB` allowed at a non-addressed ion.
    pub min_dd_ratio: f64,
    /// Rabi rate per tesla of field amplitude.
    pub rabi_per_tesla: f64,
    #[serde(default)]
    pub gate: GateSettings,
}

impl ChainSpec {
    /// 17 ions, 5 μm apart, 40 μm above three electrodes 40 μm apart, with
    /// a 200 kHz axial mode and 6 nm zero-point amplitude.
    pub fn reference() -> Self {
        Self {
            n_ions: 17,
            spacing: 5e-6,
            ion_height: 40e-6,
            electrodes: vec![-40e-6, 0.0, 40e-6],
            central_electrode: 1,
            epsilon: 3e-5,
            mode: MotionalMode::cold(2.0 * PI * 200e3, 6e-9),
            min_dd_ratio: (8.0f64 / 7e-5).sqrt(),
            rabi_per_tesla: BOHR_RABI_PER_TESLA,
            gate: GateSettings::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        let bad = |m: String| Err(ChainError::InvalidSpec(m));
        if self.n_ions < 2 {
            return bad(format!("need at least 2 ions, got {}", self.n_ions));
        }
        if !(self.spacing > 0.0) || !(self.ion_height > 0.0) {
            return bad("spacing and ion height must be positive".into());
        }
        if !(self.epsilon >= 0.0) {
            return bad(format!("epsilon must be non-negative, got {}", self.epsilon));
        }
        if self.electrodes.len() < 3 {
            return bad("need at least three electrodes".into());
        }
        if self.central_electrode >= self.electrodes.len() {
            return bad("central electrode index out of range".into());
        }
        if !(self.min_dd_ratio > 0.0) || !(self.rabi_per_tesla > 0.0) {
            return bad("DD ratio and Rabi conversion must be positive".into());
        }
        if !(self.gate.duration > 0.0) || self.gate.loops == 0 {
            return bad("gate needs a positive duration and at least one loop".into());
        }
        self.mode.validate()?;
        Ok(())
    }

    /// Ion positions, centred on zero.
    pub fn positions(&self) -> Vec<f64> {
        let mid = 0.5 * (self.n_ions - 1) as f64;
        (0..self.n_ions).map(|k| (k as f64 - mid) * self.spacing).collect()
    }

    /// Unit-amplitude phasor of every electrode.
    pub fn phasors(&self) -> Vec<C64> {
        (0..self.electrodes.len())
            .map(|w| {
                if w == self.central_electrode {
                    C64::from_polar(1.0, PI + self.epsilon)
                } else {
                    C64::new(1.0, 0.0)
                }
            })
            .collect()
    }

    /// Electrode geometry carrying real amplitudes times the phasors.
    pub fn geometry(&self, amplitudes: &[f64]) -> Result<TrapGeometry, ChainError> {
        if amplitudes.len() != self.electrodes.len() {
            return Err(ChainError::InvalidSpec(format!(
                "{} amplitudes for {} electrodes",
                amplitudes.len(),
                self.electrodes.len()
            )));
        }
        let wires = self
            .electrodes
            .iter()
            .zip(self.phasors())
            .zip(amplitudes)
            .map(|((&x, p), &a)| Wire::new(x, p * a))
            .collect();
        Ok(TrapGeometry::new(wires, self.ion_height)?)
    }

    /// Per-electrode complex field and axial gradient per unit amplitude at
    /// `x`: `(c_w B_w(x), c_w ∂ₓB_w(x))`.
    pub(crate) fn unit_response(&self, x: f64) -> Result<Vec<(C64, C64)>, ChainError> {
        let unit = TrapGeometry::new(
            self.electrodes.iter().map(|&w| Wire::new(w, C64::new(1.0, 0.0))).collect(),
            self.ion_height,
        )?
        .unit_fields(x)?;
        Ok(unit
            .iter()
            .zip(self.phasors())
            .map(|(f, p)| (p * f[0], p * f[1]))
            .collect())
    }
}
