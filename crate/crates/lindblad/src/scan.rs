use std::f64::consts::FRAC_PI_2;

use hamiltonians::DriveParams;
use pulses::build_schedule;
use quantum_core::pauli;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{
    evolve_with, initial_state, time_for_p0, EvolveError, EvolveOptions, MotionalMode,
    SingleIonDrive,
};

/// Fixed-SDF pulse used to measure residual displacement against DD strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuppressionScenario {
    pub omega_sb: f64,
    pub delta: f64,
    pub duration: f64,
    pub walsh_order: u32,
    pub dd_ramp: f64,
    pub sb_ramp: f64,
    pub phi_dd: f64,
    pub mode: MotionalMode,
    pub fock_dim: usize,
    pub rel_tol: f64,
    /// Extra points on each side of every ratio.
    pub neighbours: usize,
    /// Half-width of the neighbourhood in ratio units; `None` uses half of
    /// [`SuppressionScenario::oscillation_period`].
    pub half_width: Option<f64>,
}

impl SuppressionScenario {
    /// Resonant SDF at `Ω_SB/2π = 380 Hz` sized for `P₀ = 0.6` without DD,
    /// Walsh-3, DD in quadrature.
    pub fn reference(omega_m: f64, u_zpf: f64) -> Self {
        let omega_sb = 2.0 * std::f64::consts::PI * 380.0;
        Self {
            omega_sb,
            delta: 0.0,
            duration: time_for_p0(omega_sb, 0.6),
            walsh_order: 3,
            dd_ramp: 120e-9,
            sb_ramp: 2.4e-6,
            phi_dd: FRAC_PI_2,
            mode: MotionalMode::cold(omega_m, u_zpf),
            fock_dim: 30,
            rel_tol: 1e-8,
            neighbours: 14,
            half_width: None,
        }
    }

    /// Ratio change that advances the DD rotation angle of one Walsh segment
    /// by 2π; the suppression error repeats on this scale.
    pub fn oscillation_period(&self) -> f64 {
        let segments = (self.walsh_order + 1).next_power_of_two() as f64;
        2.0 * std::f64::consts::PI * segments / (self.omega_sb * self.duration)
    }

    /// `1 − P₀` at a single DD/SB ratio.
    pub fn error_at(&self, ratio: f64) -> Result<f64, EvolveError> {
        let schedule = build_schedule(
            self.duration,
            self.walsh_order,
            self.dd_ramp,
            self.sb_ramp,
            0.0,
        )?;
        let params = DriveParams {
            omega_sb: self.omega_sb,
            omega_dd: ratio * self.omega_sb,
            delta: self.delta,
            phi_dd: self.phi_dd,
            ..DriveParams::default()
        };
        let drive = SingleIonDrive::new(schedule, params, self.mode.omega_m);
        let q0 = pauli(quantum_core::Pauli::Z).mapv(|z| 0.5 * z)
            + quantum_core::identity(2).mapv(|z| 0.5 * z);
        let (rho0, _) = initial_state(&q0, &self.mode, self.fock_dim)?;
        let opts = EvolveOptions {
            samples: 1,
            ..EvolveOptions::with_tol(self.rel_tol)
        };
        let r = evolve_with(&drive, &self.mode, &rho0, &opts)?;
        Ok(1.0 - r.final_p0())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub ratio: f64,
    pub max_error: f64,
    /// `max (1 − P₀)·r'²/8` over the neighbourhood: the envelope coefficient
    /// relative to the `8 r⁻²` law.
    pub envelope_coefficient: f64,
    /// Every evaluated `(ratio, 1 − P₀)` in the neighbourhood.
    pub errors: Vec<(f64, f64)>,
}

/// Maximum `1 − P₀` over a local neighbourhood of each DD/SB ratio.
pub fn suppression_error_scan(
    ratios: &[f64],
    scenario: &SuppressionScenario,
) -> Result<Vec<ScanPoint>, EvolveError> {
    if let Some(r) = ratios.iter().find(|r| !(**r >= 1.0)) {
        return Err(EvolveError::InvalidInput(format!("ratio {r} below 1")));
    }
    let k = scenario.neighbours as isize;
    let half = scenario
        .half_width
        .unwrap_or(0.5 * scenario.oscillation_period());
    let grid: Vec<(usize, f64)> = ratios
        .iter()
        .enumerate()
        .flat_map(|(i, &r)| {
            (-k..=k).map(move |j| {
                let f = if k == 0 { 0.0 } else { j as f64 / k as f64 };
                (i, (r + half * f).max(1.0))
            })
        })
        .collect();
    let errors: Vec<f64> = grid
        .par_iter()
        .map(|&(_, r)| scenario.error_at(r))
        .collect::<Result<_, _>>()?;
    Ok(ratios
        .iter()
        .enumerate()
        .map(|(i, &ratio)| {
            let errs: Vec<(f64, f64)> = grid
                .iter()
                .zip(&errors)
                .filter(|((g, _), _)| *g == i)
                .map(|((_, r), e)| (*r, *e))
                .collect();
            let max_error = errs.iter().map(|e| e.1).fold(f64::NEG_INFINITY, f64::max);
            let envelope_coefficient = errs
                .iter()
                .map(|(r, e)| e * r * r / 8.0)
                .fold(f64::NEG_INFINITY, f64::max);
            ScanPoint {
                ratio,
                max_error,
                envelope_coefficient,
                errors: errs,
            }
        })
        .collect())
}
