use std::f64::consts::PI;

use hamiltonians::{
    dd_terms, off_resonant_terms, sdf_terms, DriveParams, SidebandBalance, SpinBosonTerms,
};
use pulses::{PulseSchedule, ToneRole};

/// A time-dependent drive in spin-boson form.
///
/// `terms` receives both the evaluation time `t` and a reference time `t_ref`
/// inside the current integration interval; segment membership is decided by
/// `t_ref`, so trial stages that land a hair outside the interval still see
/// the right segment.
pub trait Drive: Sync {
    fn qubit_dim(&self) -> usize;
    fn schedule(&self) -> &PulseSchedule;
    fn terms(&self, t: f64, t_ref: f64, out: &mut SpinBosonTerms);
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DriveOptions {
    /// Include the off-resonant carrier of the gradient tones.
    pub off_resonant: bool,
    /// Fractional DD amplitude change across the whole schedule.
    pub dd_linear_drift: f64,
    /// Static qubit detuning from the drive frame (rad/s).
    pub qubit_detuning: f64,
}

/// One ion driven by the tones of a [`PulseSchedule`].
///
/// Tone amplitudes scale `Ω_DD` and `Ω_SB`; tone phases add to `φ_DD` and
/// `φ_grad`; a tone offset shifts the detuning of that tone. A negative
/// Walsh sign adds π to the DD phase.
#[derive(Debug, Clone)]
pub struct SingleIonDrive {
    pub schedule: PulseSchedule,
    pub params: DriveParams,
    pub omega_m: f64,
    pub options: DriveOptions,
}

impl SingleIonDrive {
    pub fn new(schedule: PulseSchedule, params: DriveParams, omega_m: f64) -> Self {
        Self {
            schedule,
            params,
            omega_m,
            options: DriveOptions::default(),
        }
    }

    pub fn with_options(mut self, options: DriveOptions) -> Self {
        self.options = options;
        self
    }
}

impl Drive for SingleIonDrive {
    fn qubit_dim(&self) -> usize {
        2
    }

    fn schedule(&self) -> &PulseSchedule {
        &self.schedule
    }

    fn terms(&self, t: f64, t_ref: f64, out: &mut SpinBosonTerms) {
        out.bare.fill(0.0.into());
        out.lower.fill(0.0.into());
        let det = 0.5 * self.options.qubit_detuning;
        out.bare[[0, 0]] -= det;
        out.bare[[1, 1]] += det;

        let Some(seg) = self.schedule.segment_at(t_ref) else {
            return;
        };
        let p = &self.params;
        let tc = t.clamp(seg.t_start, seg.t_end);

        if let Some(dd) = seg.tone(ToneRole::Dd) {
            let env = seg.envelope(tc, ToneRole::Dd);
            if env > 0.0 {
                let drift = 1.0
                    + self.options.dd_linear_drift * t / self.schedule.total_duration.max(1e-300);
                let flip = if seg.walsh_sign < 0 { PI } else { 0.0 };
                let phase = p.phi_dd + dd.phase + flip - dd.offset * t;
                out.add_assign(&dd_terms(p.omega_dd * dd.amplitude * env * drift, phase));
            }
        }

        let env = seg.envelope(tc, ToneRole::RedSideband);
        if env <= 0.0 {
            return;
        }
        for role in [ToneRole::RedSideband, ToneRole::BlueSideband] {
            let Some(tone) = seg.tone(role) else { continue };
            let mut q = *p;
            q.delta += tone.offset;
            let balance = if role == ToneRole::RedSideband {
                SidebandBalance {
                    red: tone.amplitude,
                    blue: 0.0,
                    red_phase: tone.phase,
                    blue_phase: 0.0,
                }
            } else {
                SidebandBalance {
                    red: 0.0,
                    blue: tone.amplitude,
                    red_phase: 0.0,
                    blue_phase: tone.phase,
                }
            };
            out.add_assign(&sdf_terms(&q, t, env, balance));
        }
        if self.options.off_resonant {
            let amp = seg
                .tone(ToneRole::RedSideband)
                .or(seg.tone(ToneRole::BlueSideband))
                .map_or(0.0, |t| t.amplitude);
            if let Ok(carrier) = off_resonant_terms(p, self.omega_m, t, env * amp) {
                out.add_assign(&carrier);
            }
        }
    }
}
