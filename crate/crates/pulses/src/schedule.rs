use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::{walsh_signs, PulseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ToneRole {
    /// Resonant carrier used for dynamical decoupling.
    Dd,
    RedSideband,
    BlueSideband,
}

impl ToneRole {
    pub fn is_sideband(self) -> bool {
        matches!(self, ToneRole::RedSideband | ToneRole::BlueSideband)
    }

    pub fn label(self) -> &'static str {
        match self {
            ToneRole::Dd => "dd",
            ToneRole::RedSideband => "rsb",
            ToneRole::BlueSideband => "bsb",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "dd" => Some(ToneRole::Dd),
            "rsb" => Some(ToneRole::RedSideband),
            "bsb" => Some(ToneRole::BlueSideband),
            _ => None,
        }
    }
}

/// One microwave tone inside a segment.
///
/// `amplitude` scales the nominal Rabi rate of the drive and `phase` adds to
/// its nominal phase. `offset` is an extra angular detuning: for the DD tone a
/// qubit detuning, for a sideband an addition to `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveTone {
    pub role: ToneRole,
    pub offset: f64,
    pub amplitude: f64,
    pub phase: f64,
}

impl DriveTone {
    pub fn nominal(role: ToneRole) -> Self {
        Self {
            role,
            offset: 0.0,
            amplitude: 1.0,
            phase: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Ramp {
    pub up: f64,
    pub down: f64,
}

impl Ramp {
    pub fn symmetric(d: f64) -> Self {
        Self { up: d, down: d }
    }
}

/// `sin²(πτ/(2·ramp))` clamped to `[0, 1]`; a zero-length ramp is a step.
pub fn sin2_ramp(tau: f64, ramp: f64) -> f64 {
    if tau <= 0.0 {
        return if ramp > 0.0 { 0.0 } else { 1.0 };
    }
    if tau >= ramp {
        return 1.0;
    }
    (FRAC_PI_2 * tau / ramp).sin().powi(2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub t_start: f64,
    pub t_end: f64,
    pub tones: Vec<DriveTone>,
    pub walsh_sign: i8,
    pub dd_ramp: Ramp,
    pub sb_ramp: Ramp,
}

impl Segment {
    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn tone(&self, role: ToneRole) -> Option<&DriveTone> {
        self.tones.iter().find(|t| t.role == role)
    }

    /// Window over which the sideband envelope is non-zero.
    pub fn sideband_window(&self) -> (f64, f64) {
        (
            self.t_start + self.dd_ramp.up,
            self.t_end - self.dd_ramp.down,
        )
    }

    fn envelope_dd(&self, t: f64) -> f64 {
        let rise = sin2_ramp(t - self.t_start, self.dd_ramp.up);
        let fall = sin2_ramp(self.t_end - t, self.dd_ramp.down);
        rise.min(fall)
    }

    fn envelope_sb(&self, t: f64) -> f64 {
        let (a, b) = self.sideband_window();
        if t < a || t > b {
            return 0.0;
        }
        let rise = sin2_ramp(t - a, self.sb_ramp.up);
        let fall = sin2_ramp(b - t, self.sb_ramp.down);
        rise.min(fall)
    }

    /// Envelope of the tone with the given role at time `t` (0 outside the segment).
    pub fn envelope(&self, t: f64, role: ToneRole) -> f64 {
        if t < self.t_start || t > self.t_end {
            return 0.0;
        }
        match role {
            ToneRole::Dd => self.envelope_dd(t),
            ToneRole::RedSideband | ToneRole::BlueSideband => self.envelope_sb(t),
        }
    }

    /// Times inside the segment where the envelopes have kinks.
    pub fn corner_times(&self) -> Vec<f64> {
        let (a, b) = self.sideband_window();
        let mut v = vec![
            self.t_start,
            a,
            a + self.sb_ramp.up,
            b - self.sb_ramp.down,
            b,
            self.t_end,
        ];
        v.sort_by(f64::total_cmp);
        v.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * self.t_end.abs().max(1.0));
        v
    }

    pub fn validate(&self) -> Result<(), PulseError> {
        let len = self.duration();
        if !(len > 0.0) {
            return Err(PulseError::Infeasible(format!(
                "segment [{}, {}] has non-positive length",
                self.t_start, self.t_end
            )));
        }
        for r in [self.dd_ramp, self.sb_ramp] {
            if r.up < 0.0 || r.down < 0.0 {
                return Err(PulseError::Infeasible("negative ramp duration".into()));
            }
        }
        let needed = self.dd_ramp.up + self.dd_ramp.down + self.sb_ramp.up + self.sb_ramp.down;
        if needed > len * (1.0 + 1e-12) {
            return Err(PulseError::Infeasible(format!(
                "ramps need {needed:e} s but segment lasts {len:e} s"
            )));
        }
        if self.walsh_sign != 1 && self.walsh_sign != -1 {
            return Err(PulseError::Infeasible("Walsh sign must be ±1".into()));
        }
        Ok(())
    }
}

/// Free-function form of [`Segment::envelope`].
pub fn envelope(t: f64, segment: &Segment, role: ToneRole) -> f64 {
    segment.envelope(t, role)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    pub segments: Vec<Segment>,
    pub total_duration: f64,
}

impl PulseSchedule {
    /// A schedule with no tones at all (a pure wait).
    pub fn delay(duration: f64) -> Self {
        Self {
            segments: Vec::new(),
            total_duration: duration,
        }
    }

    pub fn validate(&self) -> Result<(), PulseError> {
        let mut last_end = 0.0;
        for s in &self.segments {
            s.validate()?;
            if s.t_start < last_end - 1e-15 {
                return Err(PulseError::Infeasible(format!(
                    "segment starting at {} overlaps the previous one",
                    s.t_start
                )));
            }
            last_end = s.t_end;
        }
        if last_end > self.total_duration * (1.0 + 1e-12) {
            return Err(PulseError::Infeasible(
                "segments extend past the total duration".into(),
            ));
        }
        Ok(())
    }

    pub fn segment_at(&self, t: f64) -> Option<&Segment> {
        self.segments
            .iter()
            .find(|s| t >= s.t_start && t <= s.t_end)
    }

    /// Sorted, de-duplicated list of every segment boundary and envelope corner,
    /// plus 0 and the total duration.
    pub fn event_times(&self) -> Vec<f64> {
        let mut v = vec![0.0, self.total_duration];
        for s in &self.segments {
            v.extend(s.corner_times());
        }
        v.sort_by(f64::total_cmp);
        let scale = self.total_duration.abs().max(1e-300);
        v.dedup_by(|x, y| (*x - *y).abs() <= 1e-13 * scale);
        v
    }

    /// Drop every tone of the given role (e.g. to get a sideband-only pulse).
    pub fn without(&self, role: ToneRole) -> Self {
        let mut out = self.clone();
        for s in &mut out.segments {
            s.tones.retain(|t| t.role != role);
        }
        out
    }

    /// Apply `f` to every tone of the given role.
    pub fn map_tones(&self, role: ToneRole, f: impl Fn(&mut DriveTone)) -> Self {
        let mut out = self.clone();
        for s in &mut out.segments {
            for t in s.tones.iter_mut().filter(|t| t.role == role) {
                f(t);
            }
        }
        out
    }
}

/// Split `gate_duration` of drive time into `2^k` Walsh segments separated by
/// `inter_pulse_delay`. Every segment carries a DD tone and a balanced sideband
/// pair, each with its own sin² ramps.
pub fn build_schedule(
    gate_duration: f64,
    walsh_order: u32,
    dd_ramp: f64,
    sb_ramp: f64,
    inter_pulse_delay: f64,
) -> Result<PulseSchedule, PulseError> {
    let walsh = walsh_signs(walsh_order)?;
    if !(gate_duration > 0.0) {
        return Err(PulseError::Infeasible("gate duration must be positive".into()));
    }
    if dd_ramp < 0.0 || sb_ramp < 0.0 {
        return Err(PulseError::Infeasible("ramp durations must be non-negative".into()));
    }
    if inter_pulse_delay < 0.0 {
        return Err(PulseError::Infeasible("inter-pulse delay must be non-negative".into()));
    }
    let n = walsh.len();
    let seg_len = gate_duration / n as f64;
    if 2.0 * (dd_ramp + sb_ramp) >= seg_len {
        return Err(PulseError::Infeasible(format!(
            "each of {n} segments lasts {seg_len:e} s, shorter than its ramps 2·({dd_ramp:e} + {sb_ramp:e}) s"
        )));
    }
    let tones = vec![
        DriveTone::nominal(ToneRole::Dd),
        DriveTone::nominal(ToneRole::RedSideband),
        DriveTone::nominal(ToneRole::BlueSideband),
    ];
    let segments: Vec<Segment> = walsh
        .signs
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let t_start = i as f64 * (seg_len + inter_pulse_delay);
            Segment {
                t_start,
                t_end: t_start + seg_len,
                tones: tones.clone(),
                walsh_sign: s,
                dd_ramp: Ramp::symmetric(dd_ramp),
                sb_ramp: Ramp::symmetric(sb_ramp),
            }
        })
        .collect();
    let total_duration = gate_duration + (n - 1) as f64 * inter_pulse_delay;
    let sched = PulseSchedule {
        segments,
        total_duration,
    };
    sched.validate()?;
    Ok(sched)
}
