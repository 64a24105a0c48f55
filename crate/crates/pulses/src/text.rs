//! Line-oriented schedule format.
//!
//! ```text
//! # comment
//! total_duration 0.00075
//! segment <start> <end> <walsh_sign> <dd_up> <dd_down> <sb_up> <sb_down> [<role> <offset> <amplitude> <phase>]...
//! ```
//!
//! Numbers use Rust's shortest round-trip formatting, so write/parse is lossless.

use std::fmt::Write as _;

use crate::{DriveTone, PulseError, PulseSchedule, Ramp, Segment, ToneRole};

pub fn write_schedule(s: &PulseSchedule) -> String {
    let mut out = String::new();
    out.push_str("# start end walsh_sign dd_up dd_down sb_up sb_down [role offset amplitude phase]...\n");
    let _ = writeln!(out, "total_duration {}", s.total_duration);
    for seg in &s.segments {
        let _ = write!(
            out,
            "segment {} {} {} {} {} {} {}",
            seg.t_start,
            seg.t_end,
            seg.walsh_sign,
            seg.dd_ramp.up,
            seg.dd_ramp.down,
            seg.sb_ramp.up,
            seg.sb_ramp.down
        );
        for t in &seg.tones {
            let _ = write!(
                out,
                " {} {} {} {}",
                t.role.label(),
                t.offset,
                t.amplitude,
                t.phase
            );
        }
        out.push('\n');
    }
    out
}

pub fn parse_schedule(text: &str) -> Result<PulseSchedule, PulseError> {
    let mut total = None;
    let mut segments = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |msg: String| PulseError::Parse { line, msg };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| err(format!("expected a number, found {s:?}")))
        };
        match fields[0] {
            "total_duration" => {
                if fields.len() != 2 {
                    return Err(err("total_duration takes one value".into()));
                }
                total = Some(num(fields[1])?);
            }
            "segment" => {
                if fields.len() < 8 || !(fields.len() - 8).is_multiple_of(4) {
                    return Err(err(format!(
                        "segment needs 7 fields plus groups of 4 tone fields, got {}",
                        fields.len() - 1
                    )));
                }
                let sign: i8 = fields[3]
                    .parse()
                    .map_err(|_| err(format!("bad Walsh sign {:?}", fields[3])))?;
                let tones = fields[8..]
                    .chunks(4)
                    .map(|c| {
                        let role = ToneRole::from_label(c[0])
                            .ok_or_else(|| err(format!("unknown tone role {:?}", c[0])))?;
                        Ok(DriveTone {
                            role,
                            offset: num(c[1])?,
                            amplitude: num(c[2])?,
                            phase: num(c[3])?,
                        })
                    })
                    .collect::<Result<Vec<_>, PulseError>>()?;
                let seg = Segment {
                    t_start: num(fields[1])?,
                    t_end: num(fields[2])?,
                    walsh_sign: sign,
                    dd_ramp: Ramp {
                        up: num(fields[4])?,
                        down: num(fields[5])?,
                    },
                    sb_ramp: Ramp {
                        up: num(fields[6])?,
                        down: num(fields[7])?,
                    },
                    tones,
                };
                seg.validate().map_err(|e| err(e.to_string()))?;
                segments.push(seg);
            }
            other => return Err(err(format!("unknown record {other:?}"))),
        }
    }
    let total_duration = total.ok_or(PulseError::Parse {
        line: 0,
        msg: "missing total_duration".into(),
    })?;
    let s = PulseSchedule {
        segments,
        total_duration,
    };
    s.validate()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build_schedule;

    #[test]
    fn round_trip_is_exact() {
        let s = build_schedule(1.30e-3, 15, 1.6e-6, 1.6e-6, 24e-6).unwrap();
        let s2 = s.map_tones(ToneRole::BlueSideband, |t| t.amplitude = 0.9937);
        let text = write_schedule(&s2);
        assert_eq!(text.lines().filter(|l| l.starts_with("segment")).count(), 16);
        assert_eq!(parse_schedule(&text).unwrap(), s2);
    }

    #[test]
    fn reports_line_numbers() {
        let text = "total_duration 1\nsegment 0 1 1 0 0 0 0 xx 0 1 0\n";
        match parse_schedule(text) {
            Err(PulseError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_schedule("segment 0 1 1 0 0 0 0\n").is_err());
    }
}
