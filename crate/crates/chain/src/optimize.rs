use std::f64::consts::FRAC_PI_2;

use hamiltonians::residual_sdf_strength;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::{ChainError, ChainSpec};

/// Phase of the DD generator relative to the sideband generator. With real
/// currents the fields are nearly real, so this offset puts the DD in
/// quadrature with the gradient wherever the ε imbalance is negligible.
pub const DD_PHASE_OFFSET: f64 = FRAC_PI_2;

/// Convergence target of both solver stages.
pub const SOLVER_TOLERANCE: f64 = 1e-10;

const GN_TOLERANCE: f64 = 1e-12;
const GN_MAX_ITER: usize = 200;

/// Drive seen by one ion. Rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IonDrive {
    pub x: f64,
    pub omega_sb: f64,
    pub phi_grad: f64,
    pub omega_dd: f64,
    pub phi_dd: f64,
    /// `Ω_SB cos(φ_grad − φ_DD)`.
    pub omega_res: f64,
    /// `8(Ω_DD/Ω_SB)⁻²`, the DD-suppressed residue of the quadrature part.
    pub quadrature_floor: f64,
}

/// Split of the force at one ion into the part that commutes with the DD and
/// the part that does not.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualStrength {
    pub omega_res: f64,
    /// `Ω_SB sin(φ_grad − φ_DD)`.
    pub quadrature: f64,
    /// `8(Ω_DD/Ω_SB)⁻²`; infinite without DD.
    pub quadrature_bound: f64,
}

pub fn residual_strength(
    omega_sb: f64,
    phi_grad: f64,
    phi_dd: f64,
    omega_dd: f64,
) -> ResidualStrength {
    let bound = if omega_dd > 0.0 {
        8.0 * (omega_sb / omega_dd).powi(2)
    } else {
        f64::INFINITY
    };
    ResidualStrength {
        omega_res: residual_sdf_strength(omega_sb, phi_grad, phi_dd),
        quadrature: omega_sb * (phi_grad - phi_dd).sin(),
        quadrature_bound: bound,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AddressingSolution {
    pub pair: (usize, usize),
    /// Sideband current amplitudes (A), one per electrode.
    pub sb_currents: Vec<f64>,
    /// DD current amplitudes (A), one per electrode.
    pub dd_currents: Vec<f64>,
    pub ions: Vec<IonDrive>,
    /// `Ω_res` at the addressed ions, whose force is in phase by construction.
    pub addressed_strength: f64,
    /// Relative gradient mismatch `(|g_i|²−|g_j|²)/(|g_i|²+|g_j|²)`.
    pub sb_residual: f64,
    /// Largest in-quadrature DD field at an addressed ion, relative to the
    /// largest DD field on the chain.
    pub dd_residual: f64,
    pub iterations: usize,
    /// Both residuals below [`SOLVER_TOLERANCE`].
    pub converged: bool,
}

impl AddressingSolution {
    /// `ζ_k = Ω_res,k / Ω_res,addressed` for every ion.
    pub fn zeta(&self) -> Vec<f64> {
        self.ions.iter().map(|d| d.omega_res / self.addressed_strength).collect()
    }

    pub fn is_addressed(&self, k: usize) -> bool {
        k == self.pair.0 || k == self.pair.1
    }
}

struct Response {
    field: Vec<Vec<C64>>,
    grad: Vec<Vec<C64>>,
}

fn responses(spec: &ChainSpec, xs: &[f64]) -> Result<Response, ChainError> {
    let mut field = Vec::with_capacity(xs.len());
    let mut grad = Vec::with_capacity(xs.len());
    for &x in xs {
        let r = spec.unit_response(x)?;
        field.push(r.iter().map(|p| p.0).collect());
        grad.push(r.iter().map(|p| p.1).collect());
    }
    Ok(Response { field, grad })
}

fn dot(a: &[C64], s: &[f64]) -> C64 {
    a.iter().zip(s).map(|(a, s)| a * s).sum()
}

/// Per-ion drive for given current amplitudes.
pub fn ion_drives(
    spec: &ChainSpec,
    sb_currents: &[f64],
    dd_currents: &[f64],
) -> Result<Vec<IonDrive>, ChainError> {
    let xs = spec.positions();
    let resp = responses(spec, &xs)?;
    let gamma = spec.rabi_per_tesla;
    Ok(xs
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let g = dot(&resp.grad[k], sb_currents);
            let b = dot(&resp.field[k], dd_currents);
            let omega_sb = gamma * spec.mode.u_zpf * g.norm();
            let omega_dd = gamma * b.norm();
            let phi_grad = g.arg();
            let phi_dd = b.arg() + DD_PHASE_OFFSET;
            let r = residual_strength(omega_sb, phi_grad, phi_dd, omega_dd);
            IonDrive {
                x,
                omega_sb,
                phi_grad,
                omega_dd,
                phi_dd,
                omega_res: r.omega_res,
                quadrature_floor: if omega_sb > 0.0 { r.quadrature_bound } else { 0.0 },
            }
        })
        .collect())
}

/// Normalized gradient mismatch and its gradient with respect to the
/// amplitudes.
fn mismatch(ai: &[C64], aj: &[C64], s: &[f64]) -> (f64, Vec<f64>) {
    let (gi, gj) = (dot(ai, s), dot(aj, s));
    let (p, q) = (gi.norm_sqr(), gj.norm_sqr());
    let sum = p + q;
    if sum == 0.0 {
        return (0.0, vec![0.0; s.len()]);
    }
    let r = (p - q) / sum;
    let jac = ai
        .iter()
        .zip(aj)
        .map(|(a, b)| {
            let dp = 2.0 * (gi.conj() * a).re;
            let dq = 2.0 * (gj.conj() * b).re;
            2.0 * (q * dp - p * dq) / (sum * sum)
        })
        .collect();
    (r, jac)
}

/// Stage 1: smallest change of the unit amplitudes that equalizes the
/// gradient magnitude at both ions. A linear projection onto
/// `Re g_i = ±Re g_j` gives the start; damped minimal-norm Gauss–Newton
/// steps then solve the exact modulus condition.
fn equalize_gradients(ai: &[C64], aj: &[C64]) -> (Vec<f64>, f64, usize) {
    let n = ai.len();
    let nominal = vec![1.0; n];
    let mut start = nominal.clone();
    let mut best = f64::INFINITY;
    for sign in [1.0, -1.0] {
        let a: Vec<f64> = ai.iter().zip(aj).map(|(x, y)| x.re - sign * y.re).collect();
        let aa: f64 = a.iter().map(|v| v * v).sum();
        if aa == 0.0 {
            continue;
        }
        let proj: f64 = a.iter().zip(&nominal).map(|(a, s)| a * s).sum::<f64>() / aa;
        let cand: Vec<f64> = nominal.iter().zip(&a).map(|(s, a)| s - proj * a).collect();
        let gi = dot(ai, &cand).norm();
        let moved = proj.abs() * aa.sqrt();
        if gi > 0.0 && moved < best {
            best = moved;
            start = cand;
        }
    }

    let mut s = start;
    let (mut r, mut jac) = mismatch(ai, aj, &s);
    let mut it = 0;
    while r.abs() > GN_TOLERANCE && it < GN_MAX_ITER {
        it += 1;
        let jj: f64 = jac.iter().map(|v| v * v).sum();
        if jj == 0.0 {
            break;
        }
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = s.iter().zip(&jac).map(|(s, j)| s - lambda * r * j / jj).collect();
            let (rt, jt) = mismatch(ai, aj, &trial);
            if rt.abs() < r.abs() {
                s = trial;
                r = rt;
                jac = jt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (s, r.abs(), it)
}

/// Stage 2: DD amplitudes whose field is in phase (mod π) with the gradient
/// at both addressed ions, i.e. `Re(e^{−iφ_grad} e^{iπ/2} B_DD) = 0` there.
/// The constraint is linear; the solution is the right singular vector of the
/// smallest singular value, with its largest entry made positive.
fn align_dd(rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows[0].len();
    let m = DMatrix::from_fn(n.max(rows.len()), n, |r, c| rows.get(r).map_or(0.0, |row| row[c]));
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let k = (0..svd.singular_values.len())
        .min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
        .unwrap();
    let mut d: Vec<f64> = (0..n).map(|c| vt[(k, c)]).collect();
    let lead = d.iter().cloned().fold(0.0, |a: f64, v| if v.abs() > a.abs() { v } else { a });
    if lead < 0.0 {
        d.iter_mut().for_each(|v| *v = -*v);
    }
    d
}

/// Two-stage current optimization addressing ions `i` and `j`.
///
/// The sideband currents are scaled to give `Ω_SB` of the gate settings at
/// the addressed ions; the DD currents are scaled so that the weakest
/// non-addressed ion sees `Ω_DD/Ω_SB = min_dd_ratio`.
pub fn optimize_currents(
    spec: &ChainSpec,
    pair: (usize, usize),
) -> Result<AddressingSolution, ChainError> {
    spec.validate()?;
    let (i, j) = pair;
    if i == j || i >= spec.n_ions || j >= spec.n_ions {
        return Err(ChainError::InvalidPair { i, j, n: spec.n_ions });
    }
    let xs = spec.positions();
    let resp = responses(spec, &[xs[i], xs[j]])?;
    let (s, sb_residual, iterations) = equalize_gradients(&resp.grad[0], &resp.grad[1]);

    let gamma = spec.rabi_per_tesla;
    let gi = dot(&resp.grad[0], &s);
    if gi.norm() == 0.0 {
        return Err(ChainError::Degenerate(format!("no gradient at ion {i}")));
    }
    let sb_scale = spec.gate.omega_sb() / (gamma * spec.mode.u_zpf * gi.norm());
    let sb: Vec<f64> = s.iter().map(|v| v * sb_scale).collect();
    let phi_i = gi.arg();
    let phi_j = dot(&resp.grad[1], &s).arg();

    let rows: Vec<Vec<f64>> = [(0, phi_i), (1, phi_j)]
        .iter()
        .map(|&(k, phi)| {
            let rot = C64::from_polar(1.0, DD_PHASE_OFFSET - phi);
            resp.field[k].iter().map(|f| (rot * f).im).collect()
        })
        .collect();
    let d_unit = align_dd(&rows);

    let unit = ion_drives(spec, &sb, &d_unit)?;
    let mut weakest = f64::INFINITY;
    for (k, d) in unit.iter().enumerate() {
        if k != i && k != j && d.omega_sb > 0.0 {
            weakest = weakest.min(d.omega_dd / d.omega_sb);
        }
    }
    if !(weakest > 0.0 && weakest.is_finite()) {
        return Err(ChainError::Degenerate(format!(
            "DD field vanishes at a non-addressed ion for pair ({i}, {j})"
        )));
    }
    let dd_scale = spec.min_dd_ratio / weakest;
    let dd: Vec<f64> = d_unit.iter().map(|v| v * dd_scale).collect();
    let ions = ion_drives(spec, &sb, &dd)?;

    let b_max = ions.iter().map(|d| d.omega_dd).fold(0.0, f64::max);
    let dd_residual = [i, j]
        .iter()
        .map(|&k| (ions[k].omega_dd * (ions[k].phi_dd - ions[k].phi_grad).sin()).abs() / b_max)
        .fold(0.0, f64::max);
    let addressed_strength = 0.5 * (ions[i].omega_sb + ions[j].omega_sb);
    Ok(AddressingSolution {
        pair,
        sb_currents: sb,
        dd_currents: dd,
        ions,
        addressed_strength,
        sb_residual,
        dd_residual,
        iterations,
        converged: sb_residual <= SOLVER_TOLERANCE && dd_residual <= SOLVER_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn residual_strength_limits() {
        let r = residual_strength(2.0, 0.3, 0.3, 100.0);
        assert!((r.omega_res - 2.0).abs() < 1e-15);
        let r = residual_strength(2.0, 0.3 + PI / 2.0, 0.3, 100.0);
        assert!(r.omega_res.abs() < 1e-15);
        assert!((r.quadrature_bound - 8.0 * 4e-4).abs() < 1e-15);
        let r = residual_strength(1.0, PI / 2.0 - 1e-3, 0.0, 0.0);
        assert!((r.omega_res - 1e-3).abs() < 1e-9);
        assert!(r.quadrature_bound.is_infinite());
    }

    #[test]
    fn mismatch_gradient_matches_finite_difference() {
        let ai = [C64::new(1.0, 0.1), C64::new(-0.4, 0.02), C64::new(0.3, 0.0)];
        let aj = [C64::new(0.2, 0.0), C64::new(0.9, -0.05), C64::new(-0.5, 0.01)];
        let s = [0.7, 1.1, -0.4];
        let (r, jac) = mismatch(&ai, &aj, &s);
        for w in 0..3 {
            let mut sp = s;
            sp[w] += 1e-7;
            let fd = (mismatch(&ai, &aj, &sp).0 - r) / 1e-7;
            assert!((fd - jac[w]).abs() < 1e-6, "{fd} vs {}", jac[w]);
        }
    }

    #[test]
    fn solver_meets_tolerances_for_an_off_centre_pair() {
        let spec = ChainSpec::reference();
        let sol = optimize_currents(&spec, (4, 7)).unwrap();
        assert!(sol.converged, "{} {}", sol.sb_residual, sol.dd_residual);
        let (a, b) = (sol.ions[4], sol.ions[7]);
        assert!((a.omega_sb - b.omega_sb).abs() <= 1e-10 * a.omega_sb);
        assert!((a.omega_sb - spec.gate.omega_sb()).abs() < 1e-9 * a.omega_sb);
        for d in [a, b] {
            assert!((d.phi_dd - d.phi_grad).sin().abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_degenerate_pairs() {
        let spec = ChainSpec::reference();
        assert!(optimize_currents(&spec, (3, 3)).is_err());
        assert!(optimize_currents(&spec, (3, 17)).is_err());
    }
}
