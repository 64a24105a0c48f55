use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::FieldError;

/// `μ₀/2π` in T·m/A.
pub const MU0_OVER_2PI: f64 = 2e-7;

const HBAR: f64 = 1.054_571_817e-34;
const AMU: f64 = 1.660_539_066_60e-27;

/// Zero-point amplitude `√(ħ/2mω)` in metres.
pub fn zero_point_amplitude(mass_amu: f64, omega: f64) -> f64 {
    (HBAR / (2.0 * mass_amu * AMU * omega)).sqrt()
}

/// One wire: lateral position along x and a current phasor stored as
/// `[re, im]` so the JSON form stays plain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wire {
    pub position: f64,
    pub current: [f64; 2],
}

impl Wire {
    pub fn new(position: f64, current: C64) -> Self {
        Self {
            position,
            current: [current.re, current.im],
        }
    }

    pub fn current(&self) -> C64 {
        C64::new(self.current[0], self.current[1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapGeometry {
    pub wires: Vec<Wire>,
    pub ion_height: f64,
}

impl TrapGeometry {
    pub fn new(wires: Vec<Wire>, ion_height: f64) -> Result<Self, FieldError> {
        let g = Self { wires, ion_height };
        g.validate()?;
        Ok(g)
    }

    /// Two wires at `±half_spacing` with the second current
    /// `−amplitude·e^{i·phase}` relative to the first.
    pub fn two_wire(
        half_spacing: f64,
        ion_height: f64,
        amplitude: f64,
        phase: f64,
    ) -> Result<Self, FieldError> {
        Self::new(
            vec![
                Wire::new(-half_spacing, C64::new(1.0, 0.0)),
                Wire::new(half_spacing, -C64::from_polar(amplitude, phase)),
            ],
            ion_height,
        )
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        if self.wires.is_empty() {
            return Err(FieldError::InvalidGeometry("no wires".into()));
        }
        if !(self.ion_height > 0.0) {
            return Err(FieldError::InvalidGeometry("ion height must be positive".into()));
        }
        Ok(())
    }

    /// Multiply every current by `c`.
    pub fn scaled(&self, c: C64) -> Self {
        let mut g = self.clone();
        for w in &mut g.wires {
            *w = Wire::new(w.position, w.current() * c);
        }
        g
    }

    /// Per-wire contributions `(B_x, ∂B_x/∂x, ∂B_x/∂y)` per ampere at lateral
    /// position `x`, with y the height above the wire plane.
    pub fn unit_fields(&self, x: f64) -> Result<Vec<[f64; 3]>, FieldError> {
        let h = self.ion_height;
        self.wires
            .iter()
            .map(|w| {
                let dx = x - w.position;
                let r2 = dx * dx + h * h;
                if r2 == 0.0 {
                    return Err(FieldError::SingularPosition { x });
                }
                let k = MU0_OVER_2PI;
                let r4 = r2 * r2;
                Ok([
                    -k * h / r2,
                    2.0 * k * h * dx / r4,
                    -k * (dx * dx - h * h) / r4,
                ])
            })
            .collect()
    }
}

/// Piecewise-linear motional tilt `θ(x)`, constant beyond the end points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TiltProfile {
    /// `(x, θ)` pairs sorted by x.
    pub points: Vec<(f64, f64)>,
}

impl TiltProfile {
    pub fn constant(theta: f64) -> Self {
        Self {
            points: vec![(0.0, theta)],
        }
    }

    pub fn at(&self, x: f64) -> f64 {
        let p = &self.points;
        match p.len() {
            0 => 0.0,
            1 => p[0].1,
            _ => {
                if x <= p[0].0 {
                    return p[0].1;
                }
                for w in p.windows(2) {
                    if x <= w[1].0 {
                        let f = (x - w[0].0) / (w[1].0 - w[0].0);
                        return w[0].1 + f * (w[1].1 - w[0].1);
                    }
                }
                p[p.len() - 1].1
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample {
    pub x: f64,
    pub bx: C64,
    /// Derivative of `B_x` along `u = cos θ x̂ + sin θ ŷ`.
    pub dbx_du: C64,
    pub phi_field: f64,
    pub phi_grad: f64,
    /// `u_zpf |∂B_x/∂u| / |B_x|` (infinite at a field null).
    pub eta: f64,
}

pub fn field_at(
    geometry: &TrapGeometry,
    x: f64,
    u_zpf: f64,
    theta: f64,
) -> Result<FieldSample, FieldError> {
    geometry.validate()?;
    let unit = geometry.unit_fields(x)?;
    let (c, s) = (theta.cos(), theta.sin());
    let mut bx = C64::new(0.0, 0.0);
    let mut du = C64::new(0.0, 0.0);
    for (w, f) in geometry.wires.iter().zip(&unit) {
        let i = w.current();
        bx += i * f[0];
        du += i * (c * f[1] + s * f[2]);
    }
    let eta = if bx.norm() > 0.0 {
        u_zpf * du.norm() / bx.norm()
    } else {
        f64::INFINITY
    };
    Ok(FieldSample {
        x,
        bx,
        dbx_du: du,
        phi_field: bx.arg(),
        phi_grad: du.arg(),
        eta,
    })
}

/// [`field_at`] using the zero-point amplitude and tilt of a motional mode.
pub fn field_at_mode(
    geometry: &TrapGeometry,
    x: f64,
    mode: &lindblad::MotionalMode,
) -> Result<FieldSample, FieldError> {
    field_at(geometry, x, mode.u_zpf, mode.tilt_theta)
}
