use std::f64::consts::PI;

use hamiltonians::{sigma_phi, DriveParams, SpinBosonTerms};
use lindblad::{
    evolve_with, initial_state, Drive, DriveOptions, EvolveOptions, MotionalMode, SingleIonDrive,
    GUARD_TOLERANCE,
};
use ndarray::Array2;
use num_complex::Complex64 as C64;
use pulses::{build_schedule, PulseSchedule, Segment, ToneRole};
use quantum_core::{eigh, partial_trace_motion};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::BenchError;

/// A single-qubit channel as a superoperator on row-major `vec(ρ)`:
/// `vec(E(ρ))[2a+b] = Σ S[2a+b, 2c+d] ρ[c,d]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitChannel {
    pub superop: Array2<C64>,
}

impl QubitChannel {
    pub fn identity() -> Self {
        Self {
            superop: Array2::eye(4),
        }
    }

    pub fn from_unitary(u: &Array2<C64>) -> Self {
        let superop = Array2::from_shape_fn((4, 4), |(r, c)| {
            let (a, b, x, y) = (r / 2, r % 2, c / 2, c % 2);
            u[[a, x]] * u[[b, y]].conj()
        });
        Self { superop }
    }

    /// Build from the images of `|c⟩⟨d|`, indexed `images[c][d]`.
    pub fn from_images(images: [[Array2<C64>; 2]; 2]) -> Self {
        let superop = Array2::from_shape_fn((4, 4), |(r, c)| images[c / 2][c % 2][[r / 2, r % 2]]);
        Self { superop }
    }

    pub fn apply(&self, rho: &Array2<C64>) -> Array2<C64> {
        let v: Vec<C64> = rho.iter().copied().collect();
        Array2::from_shape_fn((2, 2), |(a, b)| {
            (0..4).map(|k| self.superop[[2 * a + b, k]] * v[k]).sum()
        })
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Self) -> Self {
        Self {
            superop: next.superop.dot(&self.superop),
        }
    }

    /// `(1 − w)·a + w·b`; `w` outside `[0, 1]` extrapolates.
    pub fn lerp(a: &Self, b: &Self, w: f64) -> Self {
        Self {
            superop: &a.superop * C64::from(1.0 - w) + &b.superop * C64::from(w),
        }
    }

    /// Choi matrix `Σ |c⟩⟨d| ⊗ E(|c⟩⟨d|)`.
    pub fn choi(&self) -> Array2<C64> {
        Array2::from_shape_fn((4, 4), |(r, c)| {
            let (x, a, y, b) = (r / 2, r % 2, c / 2, c % 2);
            self.superop[[2 * a + b, 2 * x + y]]
        })
    }

    /// Smallest eigenvalue of the Hermitian part of the Choi matrix.
    pub fn min_choi_eigenvalue(&self) -> f64 {
        let j = self.choi();
        let herm = (&j + &j.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
        eigh(&herm).0.into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Largest deviation of `Tr E(|c⟩⟨d|)` from `δ_cd`.
    pub fn trace_defect(&self) -> f64 {
        (0..4)
            .map(|c| {
                let tr = self.superop[[0, c]] + self.superop[[3, c]];
                let want = if c == 0 || c == 3 { 1.0 } else { 0.0 };
                (tr - want).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest elementwise difference of the superoperators.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.superop - &other.superop)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Average infidelity to the identity, `1 − (2F + 1)/3` with `F = Tr S / 4`.
    pub fn infidelity(&self) -> f64 {
        let f_pro = self.superop.diag().sum().re / 4.0;
        1.0 - (2.0 * f_pro + 1.0) / 3.0
    }
}

/// An emulated two-tone gate pulse with an optional DD drive, on one ion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MsPulse {
    /// Sideband strength (rad/s).
    pub omega_sb: f64,
    /// Sideband detuning (rad/s).
    pub delta: f64,
    /// Drive time, excluding inter-pulse delays (s).
    pub duration: f64,
    /// DD Rabi rate (rad/s); zero disables the DD tone.
    pub omega_dd: f64,
    /// DD phase relative to the force.
    pub phi_dd: f64,
    pub walsh_order: u32,
    /// Duration of each DD and sideband ramp (s).
    pub ramp: f64,
    /// Gap between Walsh segments (s).
    pub walsh_delay: f64,
    /// Hold the sideband phase during gaps, so the loop closes over drive time.
    pub drive_time_phase: bool,
}

impl MsPulse {
    /// A flat, DD-free pulse.
    pub fn bare(omega_sb: f64, delta: f64, duration: f64) -> Self {
        Self {
            omega_sb,
            delta,
            duration,
            omega_dd: 0.0,
            phi_dd: 0.0,
            walsh_order: 0,
            ramp: 0.0,
            walsh_delay: 0.0,
            drive_time_phase: true,
        }
    }

    /// The benchmarking pulse: 380 Hz sidebands detuned by 770 Hz over
    /// 1.30 ms, Walsh-15 DD at 152 kHz, 1.6 μs ramps and 24 μs gaps.
    pub fn reference(phi_dd: f64) -> Self {
        Self {
            omega_sb: 2.0 * PI * 380.0,
            delta: 2.0 * PI * 770.0,
            duration: 1.30e-3,
            omega_dd: 2.0 * PI * 152e3,
            phi_dd,
            walsh_order: 15,
            ramp: 1.6e-6,
            walsh_delay: 24e-6,
            drive_time_phase: true,
        }
    }

    pub fn schedule(&self) -> Result<PulseSchedule, BenchError> {
        let ramp_dd = if self.omega_dd > 0.0 { self.ramp } else { 0.0 };
        let mut s = build_schedule(
            self.duration,
            self.walsh_order,
            ramp_dd,
            self.ramp,
            self.walsh_delay,
        )?;
        if self.omega_dd == 0.0 {
            s = s.without(ToneRole::Dd);
        }
        if self.omega_sb == 0.0 {
            s = s.without(ToneRole::RedSideband).without(ToneRole::BlueSideband);
        }
        if self.drive_time_phase && self.walsh_delay > 0.0 {
            let seg_len = self.duration / s.segments.len() as f64;
            for (i, seg) in s.segments.iter_mut().enumerate() {
                let hold = self.delta * (seg.t_start - i as f64 * seg_len);
                for tone in &mut seg.tones {
                    match tone.role {
                        ToneRole::RedSideband => tone.phase -= hold,
                        ToneRole::BlueSideband => tone.phase += hold,
                        ToneRole::Dd => {}
                    }
                }
            }
        }
        Ok(s)
    }

    pub fn params(&self) -> DriveParams {
        DriveParams {
            omega_sb: self.omega_sb,
            omega_dd: self.omega_dd,
            delta: self.delta,
            phi_dd: self.phi_dd,
            ..DriveParams::default()
        }
    }

    /// Whether the qubit couples to the motion at all.
    pub fn couples_to_motion(&self) -> bool {
        self.omega_sb != 0.0
    }
}

/// What sits between consecutive Cliffords.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Embedded {
    Ms(MsPulse),
    /// A wait of `duration`, optionally under a static qubit detuning (rad/s).
    Delay { duration: f64, qubit_detuning: f64 },
    None,
}

impl Embedded {
    pub fn couples_to_motion(&self) -> bool {
        matches!(self, Embedded::Ms(p) if p.couples_to_motion())
    }

    /// Time the embedded operation occupies (s).
    pub fn duration(&self) -> Result<f64, BenchError> {
        Ok(match self {
            Embedded::Ms(p) => p.schedule()?.total_duration,
            Embedded::Delay { duration, .. } => *duration,
            Embedded::None => 0.0,
        })
    }
}


/// `∫ sin²(πs/(2r)) ds` from 0 to `tau`, for `0 ≤ tau ≤ r`.
fn ramp_area(tau: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    0.5 * tau - r / (2.0 * PI) * (PI * tau / r).sin()
}

/// `∫ env_DD` over `[t_start, t]` of one segment.
fn dd_area(seg: &Segment, t: f64) -> f64 {
    let (up, down) = (seg.dd_ramp.up, seg.dd_ramp.down);
    let full = seg.duration() - 0.5 * (up + down);
    let tau = (t - seg.t_start).clamp(0.0, seg.duration());
    let sigma = seg.t_end - seg.t_start - tau;
    if tau <= up {
        ramp_area(tau, up)
    } else if sigma <= down {
        full - ramp_area(sigma, down)
    } else {
        0.5 * up + (tau - up)
    }
}

/// A single ion seen in the interaction frame of its DD drive.
///
/// The DD axis is fixed up to the Walsh sign, so the frame rotation is
/// `exp(−iθ(t)σ_φ/2)` with `θ` the signed DD area. The fast carrier then
/// drops out of the equations of motion and only the slow force is left.
struct DdFrameDrive {
    bare: SingleIonDrive,
    omega_dd: f64,
    phi_dd: f64,
    /// Signed area before each segment.
    offsets: Vec<f64>,
    /// Whether each segment carries the DD tone.
    dd: Vec<bool>,
}

impl DdFrameDrive {
    /// `None` when the DD tone carries a detuning or a per-segment phase,
    /// which this frame does not cover.
    fn new(drive: &SingleIonDrive) -> Option<Self> {
        let mut offsets = Vec::with_capacity(drive.schedule.segments.len());
        let mut dd = Vec::with_capacity(offsets.capacity());
        let mut acc = 0.0;
        for seg in &drive.schedule.segments {
            offsets.push(acc);
            let tone = seg.tone(ToneRole::Dd);
            dd.push(tone.is_some());
            if let Some(t) = tone {
                if t.offset != 0.0 || t.phase != 0.0 || t.amplitude != 1.0 {
                    return None;
                }
                acc += f64::from(seg.walsh_sign) * dd_area(seg, seg.t_end);
            }
        }
        if drive.options.dd_linear_drift != 0.0 {
            return None;
        }
        Some(Self {
            bare: SingleIonDrive {
                schedule: drive.schedule.without(ToneRole::Dd),
                ..drive.clone()
            },
            omega_dd: drive.params.omega_dd,
            phi_dd: drive.params.phi_dd,
            offsets,
            dd,
        })
    }

    fn theta(&self, t: f64, t_ref: f64) -> f64 {
        let segs = &self.bare.schedule.segments;
        let i = segs.partition_point(|s| s.t_start <= t_ref);
        if i == 0 {
            return 0.0;
        }
        let seg = &segs[i - 1];
        let own = if self.dd[i - 1] {
            f64::from(seg.walsh_sign) * dd_area(seg, t.min(seg.t_end))
        } else {
            0.0
        };
        self.omega_dd * (self.offsets[i - 1] + own)
    }

    /// `exp(−iθσ_φ/2)`.
    fn rotation(&self, theta: f64) -> Array2<C64> {
        let (c, s) = ((0.5 * theta).cos(), (0.5 * theta).sin());
        let mut u = sigma_phi(self.phi_dd).mapv(|z| z * C64::new(0.0, -s));
        u[[0, 0]] += c;
        u[[1, 1]] += c;
        u
    }
}

impl Drive for DdFrameDrive {
    fn qubit_dim(&self) -> usize {
        2
    }

    fn schedule(&self) -> &PulseSchedule {
        &self.bare.schedule
    }

    fn terms(&self, t: f64, t_ref: f64, out: &mut SpinBosonTerms) {
        self.bare.terms(t, t_ref, out);
        let u = self.rotation(self.theta(t, t_ref));
        let ud = u.t().mapv(|z| z.conj());
        out.bare = ud.dot(&out.bare).dot(&u);
        out.lower = ud.dot(&out.lower).dot(&u);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelOptions {
    pub fock_dim: usize,
    pub rel_tol: f64,
    /// Recompute at `2·fock_dim` and require agreement within the guard tolerance.
    pub guard: bool,
    /// Integrate in the interaction frame of the DD drive when possible.
    pub dd_frame: bool,
}

impl Default for ChannelOptions {
    fn default() -> Self {
        Self {
            fock_dim: 24,
            rel_tol: 1e-10,
            guard: true,
            dd_frame: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelResult {
    pub channel: QubitChannel,
    pub min_choi_eigenvalue: f64,
    pub trace_defect: f64,
    pub guard_deviation: Option<f64>,
}

fn input_states() -> [Array2<C64>; 4] {
    let c = |re: f64, im: f64| C64::new(re, im);
    let m = |v: [C64; 4]| Array2::from_shape_vec((2, 2), v.to_vec()).unwrap();
    [
        m([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
        m([c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
        m([c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)]),
        m([c(0.5, 0.0), c(0.0, -0.5), c(0.0, 0.5), c(0.5, 0.0)]),
    ]
}

/// Assemble the channel from the images of `|0⟩, |1⟩, |+⟩, |+i⟩`.
fn channel_from_outputs(out: &[Array2<C64>]) -> QubitChannel {
    let (r0, r1, rp, ri) = (&out[0], &out[1], &out[2], &out[3]);
    let diag = r0 + r1;
    let i = C64::i();
    let up = rp + &ri.mapv(|z| z * i) - &diag.mapv(|z| z * (0.5 * (1.0 + i)));
    let down = rp - &ri.mapv(|z| z * i) - &diag.mapv(|z| z * (0.5 * (1.0 - i)));
    QubitChannel::from_images([[r0.clone(), up], [down, r1.clone()]])
}

fn run_at(
    embedded: &Embedded,
    mode: &MotionalMode,
    opts: &ChannelOptions,
    fock: usize,
) -> Result<QubitChannel, BenchError> {
    let (schedule, params, det) = match embedded {
        Embedded::None => return Ok(QubitChannel::identity()),
        Embedded::Ms(p) => (p.schedule()?, p.params(), 0.0),
        Embedded::Delay {
            duration,
            qubit_detuning,
        } => (PulseSchedule::delay(*duration), DriveParams::default(), *qubit_detuning),
    };
    let drive = SingleIonDrive::new(schedule, params, mode.omega_m).with_options(DriveOptions {
        qubit_detuning: det,
        ..DriveOptions::default()
    });
    let eo = EvolveOptions {
        samples: 1,
        ..EvolveOptions::with_tol(opts.rel_tol)
    };
    let frame = if opts.dd_frame && drive.params.omega_dd != 0.0 {
        DdFrameDrive::new(&drive)
    } else {
        None
    };
    let (active, back): (&dyn Drive, Array2<C64>) = match &frame {
        Some(f) => {
            let end = drive.schedule.total_duration;
            (f, f.rotation(f.theta(end, end)))
        }
        None => (&drive, Array2::eye(2)),
    };
    let back_d = back.t().mapv(|z| z.conj());
    let outputs = input_states()
        .par_iter()
        .map(|q| {
            let (rho0, _) = initial_state(q, mode, if embedded.couples_to_motion() { fock } else { 2 })?;
            let r = evolve_with(active, mode, &rho0, &eo)?;
            Ok(back.dot(&partial_trace_motion(&r.rho_final)).dot(&back_d))
        })
        .collect::<Result<Vec<_>, BenchError>>()?;
    Ok(channel_from_outputs(&outputs))
}

/// Qubit channel of one embedded operation, with the mode starting thermal
/// at `mode.n_bar` and heating throughout.
pub fn embedded_channel(
    embedded: &Embedded,
    mode: &MotionalMode,
    opts: &ChannelOptions,
) -> Result<ChannelResult, BenchError> {
    let (channel, guard_deviation) = if opts.guard && embedded.couples_to_motion() {
        let (a, b) = rayon::join(
            || run_at(embedded, mode, opts, opts.fock_dim),
            || run_at(embedded, mode, opts, 2 * opts.fock_dim),
        );
        let (a, b) = (a?, b?);
        let dev = a.distance(&b);
        if !(dev <= GUARD_TOLERANCE) {
            return Err(BenchError::Evolve(lindblad::EvolveError::Convergence {
                observable: "qubit channel".into(),
                deviation: dev,
                fock_dim: opts.fock_dim,
                doubled: 2 * opts.fock_dim,
            }));
        }
        (a, Some(dev))
    } else {
        (run_at(embedded, mode, opts, opts.fock_dim)?, None)
    };
    Ok(ChannelResult {
        min_choi_eigenvalue: channel.min_choi_eigenvalue(),
        trace_defect: channel.trace_defect(),
        channel,
        guard_deviation,
    })
}

/// Qubit channel of one gate-like pulse.
pub fn ms_pulse_channel(
    pulse: &MsPulse,
    mode: &MotionalMode,
    opts: &ChannelOptions,
) -> Result<ChannelResult, BenchError> {
    embedded_channel(&Embedded::Ms(*pulse), mode, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use quantum_core::{pauli, Pauli};

    #[test]
    fn unitary_channel_roundtrip() {
        let u = pauli(Pauli::Y);
        let ch = QubitChannel::from_unitary(&u);
        for rho in input_states() {
            let want = u.dot(&rho).dot(&u.t().mapv(|z| z.conj()));
            assert!((&ch.apply(&rho) - &want).iter().all(|z| z.norm() < 1e-15));
        }
        assert!(ch.trace_defect() < 1e-15);
        assert!(ch.min_choi_eigenvalue() > -1e-12);
        assert!((QubitChannel::identity().infidelity()).abs() < 1e-15);
    }

    #[test]
    fn reconstruction_from_pauli_inputs() {
        let u = quantum_core::expm_hermitian(
            &(pauli(Pauli::X) * C64::from(0.3) + pauli(Pauli::Z) * C64::from(0.7)),
            C64::new(0.0, -1.0),
        );
        let want = QubitChannel::from_unitary(&u);
        let outs: Vec<_> = input_states().iter().map(|r| want.apply(r)).collect();
        assert!(channel_from_outputs(&outs).distance(&want) < 1e-14);
    }

    #[test]
    fn dephasing_is_cp_and_transpose_is_not() {
        let mut s = Array2::<C64>::eye(4);
        s[[1, 1]] = 0.3.into();
        s[[2, 2]] = 0.3.into();
        let ch = QubitChannel { superop: s };
        assert!(ch.min_choi_eigenvalue() > -1e-12);
        let mut t = Array2::<C64>::zeros((4, 4));
        t[[0, 0]] = 1.0.into();
        t[[3, 3]] = 1.0.into();
        t[[1, 2]] = 1.0.into();
        t[[2, 1]] = 1.0.into();
        assert!(QubitChannel { superop: t }.min_choi_eigenvalue() < -0.4);
    }

    #[test]
    fn dd_area_matches_quadrature() {
        let s = build_schedule(1e-3, 3, 20e-6, 10e-6, 5e-6).unwrap();
        let seg = &s.segments[2];
        let n = 20_000;
        let h = seg.duration() / n as f64;
        let mut acc = 0.0;
        for k in 0..n {
            let t = seg.t_start + (k as f64 + 0.5) * h;
            acc += seg.envelope(t, ToneRole::Dd) * h;
            if k % 1000 == 999 {
                let t_end = seg.t_start + (k + 1) as f64 * h;
                assert!((dd_area(seg, t_end) - acc).abs() < 1e-12, "k={k}");
            }
        }
    }

    #[test]
    fn dd_frame_matches_lab_frame() {
        let pulse = MsPulse {
            omega_sb: 2.0 * PI * 2e3,
            delta: 2.0 * PI * 4e3,
            duration: 250e-6,
            omega_dd: 2.0 * PI * 40e3,
            phi_dd: 1.2,
            walsh_order: 3,
            ramp: 2e-6,
            walsh_delay: 5e-6,
            drive_time_phase: true,
        };
        let mode = MotionalMode::cold(2.0 * PI * 1e6, 10e-9).with_heating(300.0).with_n_bar(0.2);
        let base = ChannelOptions {
            fock_dim: 14,
            rel_tol: 1e-10,
            guard: false,
            dd_frame: false,
        };
        let lab = ms_pulse_channel(&pulse, &mode, &base).unwrap().channel;
        let rot = ms_pulse_channel(&pulse, &mode, &ChannelOptions { dd_frame: true, ..base })
            .unwrap()
            .channel;
        assert!(lab.distance(&rot) < 1e-8, "{}", lab.distance(&rot));
        assert!(lab.infidelity() > 1e-3);
    }

    #[test]
    fn hold_phase_shifts_sidebands_only() {
        let p = MsPulse::reference(0.0);
        let s = p.schedule().unwrap();
        let seg = &s.segments[3];
        let red = seg.tone(ToneRole::RedSideband).unwrap().phase;
        let blue = seg.tone(ToneRole::BlueSideband).unwrap().phase;
        assert!((red + p.delta * 3.0 * p.walsh_delay).abs() < 1e-12);
        assert!((red + blue).abs() < 1e-15);
        assert_eq!(seg.tone(ToneRole::Dd).unwrap().phase, 0.0);
    }
}
