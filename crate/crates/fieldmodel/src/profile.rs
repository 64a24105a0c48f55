use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use crate::{field_at, FieldError, TiltProfile, TrapGeometry};

/// Field phases and magnitudes along a grid of ion positions, with phases
/// unwrapped along the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseProfile {
    pub x: Vec<f64>,
    pub phi_field: Vec<f64>,
    pub phi_grad: Vec<f64>,
    pub b_abs: Vec<f64>,
    pub db_abs: Vec<f64>,
}

impl PhaseProfile {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Nearest-branch continuation: each phase is shifted by a multiple of 2π to
/// lie within π of its predecessor.
pub fn unwrap_phases(raw: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(raw.len());
    for &p in raw {
        let v = match out.last() {
            None => p,
            Some(&prev) => p + 2.0 * PI * ((prev - p) / (2.0 * PI)).round(),
        };
        out.push(v);
    }
    out
}

pub fn phase_profile(
    geometry: &TrapGeometry,
    x_grid: &[f64],
    u_zpf: f64,
    tilt: &TiltProfile,
) -> Result<PhaseProfile, FieldError> {
    let samples = x_grid
        .iter()
        .map(|&x| field_at(geometry, x, u_zpf, tilt.at(x)))
        .collect::<Result<Vec<_>, _>>()?;
    let field: Vec<f64> = samples.iter().map(|s| s.phi_field).collect();
    let grad: Vec<f64> = samples.iter().map(|s| s.phi_grad).collect();
    Ok(PhaseProfile {
        x: x_grid.to_vec(),
        phi_field: unwrap_phases(&field),
        phi_grad: unwrap_phases(&grad),
        b_abs: samples.iter().map(|s| s.bx.norm()).collect(),
        db_abs: samples.iter().map(|s| s.dbx_du.norm()).collect(),
    })
}

/// CSV with columns `x,phi_field,phi_grad,b_abs,db_abs`.
pub fn write_profile_csv<W: Write>(p: &PhaseProfile, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "phi_field", "phi_grad", "b_abs", "db_abs"])?;
    for i in 0..p.len() {
        w.write_record([
            p.x[i].to_string(),
            p.phi_field[i].to_string(),
            p.phi_grad[i].to_string(),
            p.b_abs[i].to_string(),
            p.db_abs[i].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
