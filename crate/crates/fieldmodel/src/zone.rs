use serde::{Deserialize, Serialize};

use crate::{FieldError, PhaseProfile};

/// Residual-strength model of a position scan.
///
/// The sideband pulse is calibrated at every position to bring `P₀` to
/// `p0_undriven` without DD. With DD, only the component of the force in
/// phase with the DD survives, scaled by `cos(φ_grad − φ_DD)`. The injected DD
/// phase is offset from the local field phase by `dd_phase_offset`; `None`
/// aligns DD and gradient at the field minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoneModel {
    pub p0_undriven: f64,
    pub dd_phase_offset: Option<f64>,
}

impl Default for ZoneModel {
    fn default() -> Self {
        Self {
            p0_undriven: 0.51,
            dd_phase_offset: None,
        }
    }
}

impl ZoneModel {
    fn offset(&self, p: &PhaseProfile) -> f64 {
        self.dd_phase_offset.unwrap_or_else(|| {
            let i = (0..p.len())
                .min_by(|&a, &b| p.b_abs[a].total_cmp(&p.b_abs[b]))
                .unwrap_or(0);
            p.phi_grad[i] - p.phi_field[i]
        })
    }
}

pub fn predicted_p0(profile: &PhaseProfile, model: &ZoneModel) -> Result<Vec<f64>, FieldError> {
    if profile.is_empty() {
        return Err(FieldError::InvalidInput("empty profile".into()));
    }
    if !(model.p0_undriven > 0.5 && model.p0_undriven < 1.0) {
        return Err(FieldError::InvalidInput(format!(
            "undriven P0 {} outside (0.5, 1)",
            model.p0_undriven
        )));
    }
    let alpha2 = -(2.0 * model.p0_undriven - 1.0).ln() / 2.0;
    let off = model.offset(profile);
    Ok((0..profile.len())
        .map(|i| {
            let r = (profile.phi_grad[i] - profile.phi_field[i] - off).cos();
            0.5 * (1.0 + (-2.0 * alpha2 * r * r).exp())
        })
        .collect())
}

/// Intervals of `x` where `values < threshold`, with linearly interpolated
/// end points.
pub fn threshold_intervals(x: &[f64], values: &[f64], threshold: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    let cross = |i: usize| {
        let (a, b) = (values[i - 1] - threshold, values[i] - threshold);
        x[i - 1] + (x[i] - x[i - 1]) * a / (a - b)
    };
    for (i, &v) in values.iter().enumerate().take(x.len()) {
        let below = v < threshold;
        match (below, start) {
            (true, None) => start = Some(if i == 0 { x[0] } else { cross(i) }),
            (false, Some(s)) => {
                out.push((s, cross(i)));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, x[x.len() - 1]));
    }
    out
}

/// Regions where the predicted `P₀` falls below `threshold`.
pub fn interaction_zone(
    profile: &PhaseProfile,
    threshold: f64,
) -> Result<Vec<(f64, f64)>, FieldError> {
    if !(threshold > 0.5 && threshold < 1.0) {
        return Err(FieldError::InvalidInput(format!(
            "threshold {threshold} outside (0.5, 1)"
        )));
    }
    let p0 = predicted_p0(profile, &ZoneModel::default())?;
    Ok(threshold_intervals(&profile.x, &p0, threshold))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intervals_interpolate_crossings() {
        let x = [0.0, 1.0, 2.0, 3.0, 4.0];
        let v = [1.0, 0.5, 0.5, 1.0, 0.0];
        let z = threshold_intervals(&x, &v, 0.75);
        assert_eq!(z.len(), 2);
        assert!((z[0].0 - 0.5).abs() < 1e-12 && (z[0].1 - 2.5).abs() < 1e-12);
        assert!((z[1].0 - 3.25).abs() < 1e-12 && z[1].1 == 4.0);
    }

    #[test]
    fn empty_profile_is_rejected() {
        let p = PhaseProfile {
            x: vec![],
            phi_field: vec![],
            phi_grad: vec![],
            b_abs: vec![],
            db_abs: vec![],
        };
        assert!(interaction_zone(&p, 0.75).is_err());
    }
}
