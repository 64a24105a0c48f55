use std::f64::consts::{FRAC_PI_2, PI};

use hamiltonians::{dd_gradient_terms, dd_terms, sdf_terms, DriveParams, SidebandBalance, SpinBosonTerms};
use lindblad::{evolve_with, initial_state, Drive, EvolveError, EvolveOptions, MotionalMode, GUARD_TOLERANCE};
use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use pulses::{build_schedule, PulseSchedule, ToneRole};
use quantum_core::{expm_hermitian, identity, kron, partial_trace_motion, trace_distance};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{optimize_currents, AddressingSolution, ChainError, ChainSpec, DD_PHASE_OFFSET};

/// Local drive of one ion in a two-qubit gate. Rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GateIon {
    pub omega_sb: f64,
    pub phi_grad: f64,
    pub omega_dd: f64,
    pub phi_dd: f64,
    /// `u_zpf ∂Ω_{DD,y}/∂u`: motion-induced change of the DD component out
    /// of phase with the sideband gradient.
    pub dd_gradient: f64,
}

/// Two ions sharing one mode, each with its own force and DD drive.
/// A negative Walsh sign flips both the DD drive and its gradient.
#[derive(Debug, Clone)]
pub struct PairDrive {
    pub schedule: PulseSchedule,
    pub ions: [GateIon; 2],
    pub delta: f64,
    pub omega_m: f64,
}

fn add_on_qubit(out: &mut Array2<C64>, op: &Array2<C64>, which: usize) {
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                let (r, s) = if which == 0 { (2 * a + c, 2 * b + c) } else { (2 * c + a, 2 * c + b) };
                out[[r, s]] += op[[a, b]];
            }
        }
    }
}

impl Drive for PairDrive {
    fn qubit_dim(&self) -> usize {
        4
    }

    fn schedule(&self) -> &PulseSchedule {
        &self.schedule
    }

    fn terms(&self, t: f64, t_ref: f64, out: &mut SpinBosonTerms) {
        out.bare.fill(C64::new(0.0, 0.0));
        out.lower.fill(C64::new(0.0, 0.0));
        let Some(seg) = self.schedule.segment_at(t_ref) else {
            return;
        };
        let tc = t.clamp(seg.t_start, seg.t_end);
        let w = if seg.walsh_sign < 0 { -1.0 } else { 1.0 };
        let env_dd = if seg.tone(ToneRole::Dd).is_some() { seg.envelope(tc, ToneRole::Dd) } else { 0.0 };
        let env_sb = seg.envelope(tc, ToneRole::RedSideband);
        for (k, ion) in self.ions.iter().enumerate() {
            if env_dd > 0.0 {
                let dd = dd_terms(ion.omega_dd * env_dd, ion.phi_dd + if w < 0.0 { PI } else { 0.0 });
                add_on_qubit(&mut out.bare, &dd.bare, k);
                if ion.dd_gradient != 0.0 {
                    let g = dd_gradient_terms(w * env_dd * ion.dd_gradient, self.omega_m, t, ion.phi_grad + FRAC_PI_2);
                    add_on_qubit(&mut out.lower, &g.lower, k);
                }
            }
            if env_sb > 0.0 && ion.omega_sb > 0.0 {
                let p = DriveParams {
                    omega_sb: ion.omega_sb,
                    delta: self.delta,
                    phi_grad: ion.phi_grad,
                    ..DriveParams::default()
                };
                let f = sdf_terms(&p, t, env_sb, SidebandBalance::default());
                add_on_qubit(&mut out.lower, &f.lower, k);
            }
        }
    }
}

/// Ideal loop-closed gate `exp[−iΦ(σ_{φ₁}⊗1 + 1⊗σ_{φ₂})²]` with `Φ = π/8`
/// for equal forces.
pub fn ideal_gate(phi_1: f64, phi_2: f64) -> Array2<C64> {
    let s1 = hamiltonians::sigma_phi(phi_1);
    let s2 = hamiltonians::sigma_phi(phi_2);
    let s = kron(&s1, &identity(2)) + kron(&identity(2), &s2);
    expm_hermitian(&s.dot(&s), C64::new(0.0, -PI / 8.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateOptions {
    pub fock_dim: usize,
    pub rel_tol: f64,
    /// Include the DD drive and its position gradient.
    pub dd: bool,
    /// Include the position gradient of the DD (ignored without DD).
    pub dd_gradient: bool,
}

impl Default for GateOptions {
    fn default() -> Self {
        Self {
            fock_dim: 20,
            rel_tol: 1e-9,
            dd: true,
            dd_gradient: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateOutcome {
    pub pair: (usize, usize),
    pub displacement: f64,
    pub n_bar: f64,
    pub infidelity: f64,
    pub ions: [GateIon; 2],
    /// `|Δ infidelity|` between `fock_dim` and `2·fock_dim`.
    pub guard_deviation: f64,
}

/// Drive of addressed ion `k` after a common shift of the chain by
/// `displacement` along its axis, with the sideband gradient phase as
/// reference for the in/out-of-phase split of the DD.
pub fn addressed_ion_drive(
    spec: &ChainSpec,
    sol: &AddressingSolution,
    k: usize,
    displacement: f64,
) -> Result<GateIon, ChainError> {
    let x = spec.positions()[k] + displacement;
    let resp = spec.unit_response(x)?;
    let gamma = spec.rabi_per_tesla;
    let mut grad = C64::new(0.0, 0.0);
    let mut b = C64::new(0.0, 0.0);
    let mut db = C64::new(0.0, 0.0);
    for ((f, g), (s, d)) in resp.iter().zip(sol.sb_currents.iter().zip(&sol.dd_currents)) {
        grad += g * s;
        b += f * d;
        db += g * d;
    }
    let phi_grad = grad.arg();
    let amp = C64::from_polar(gamma, DD_PHASE_OFFSET);
    let rot = C64::from_polar(1.0, -phi_grad);
    Ok(GateIon {
        omega_sb: gamma * spec.mode.u_zpf * grad.norm(),
        phi_grad,
        omega_dd: (amp * b).norm(),
        phi_dd: (amp * b).arg(),
        dd_gradient: spec.mode.u_zpf * (amp * db * rot).im,
    })
}

fn bell_infidelity(
    drive: &PairDrive,
    mode: &MotionalMode,
    target: &Array1<C64>,
    fock_dim: usize,
    rel_tol: f64,
) -> Result<f64, EvolveError> {
    let mut q0 = Array2::<C64>::zeros((4, 4));
    q0[[0, 0]] = C64::new(1.0, 0.0);
    let (rho0, _) = initial_state(&q0, mode, fock_dim)?;
    let opts = EvolveOptions {
        samples: 20,
        ..EvolveOptions::with_tol(rel_tol)
    };
    let res = evolve_with(drive, mode, &rho0, &opts)?;
    let rq = partial_trace_motion(&res.rho_final);
    let f: C64 = (0..4)
        .flat_map(|a| (0..4).map(move |b| (a, b)))
        .map(|(a, b)| target[a].conj() * rq[[a, b]] * target[b])
        .sum();
    Ok(1.0 - f.re)
}

fn guarded<F>(fock_dim: usize, run: F) -> Result<(f64, f64), ChainError>
where
    F: Fn(usize) -> Result<f64, EvolveError> + Sync,
{
    let (a, b) = rayon::join(|| run(fock_dim), || run(2 * fock_dim));
    let (a, b) = (a?, b?);
    let dev = (a - b).abs();
    if !(dev <= GUARD_TOLERANCE) {
        return Err(EvolveError::Convergence {
            observable: "gate infidelity".into(),
            deviation: dev,
            fock_dim,
            doubled: 2 * fock_dim,
        }
        .into());
    }
    Ok((a, dev))
}

/// Bell-state infidelity of the addressed gate on `pair` after a common chain
/// shift, starting from `|00⟩` and a thermal mode of occupation `n_bar`.
pub fn gate_error_with(
    spec: &ChainSpec,
    pair: (usize, usize),
    displacement: f64,
    n_bar: f64,
    opts: &GateOptions,
) -> Result<GateOutcome, ChainError> {
    let sol = optimize_currents(spec, pair)?;
    let mut ions = [
        addressed_ion_drive(spec, &sol, pair.0, displacement)?,
        addressed_ion_drive(spec, &sol, pair.1, displacement)?,
    ];
    for ion in &mut ions {
        if !opts.dd {
            ion.omega_dd = 0.0;
        }
        if !(opts.dd && opts.dd_gradient) {
            ion.dd_gradient = 0.0;
        }
    }
    let gate = spec.gate;
    let schedule = build_schedule(gate.duration, gate.walsh_order, 0.0, 0.0, 0.0)?;
    let drive = PairDrive {
        schedule,
        ions,
        delta: gate.delta(),
        omega_m: spec.mode.omega_m,
    };
    let mode = spec.mode.with_n_bar(n_bar);
    let u = ideal_gate(ions[0].phi_grad, ions[1].phi_grad);
    let target = u.column(0).to_owned();
    let (infidelity, guard_deviation) =
        guarded(opts.fock_dim, |n| bell_infidelity(&drive, &mode, &target, n, opts.rel_tol))?;
    Ok(GateOutcome {
        pair,
        displacement,
        n_bar,
        infidelity,
        ions,
        guard_deviation,
    })
}

pub fn gate_error_vs_position(
    spec: &ChainSpec,
    pair: (usize, usize),
    displacement: f64,
    n_bar: f64,
) -> Result<GateOutcome, ChainError> {
    gate_error_with(spec, pair, displacement, n_bar, &GateOptions::default())
}

/// Infidelities on a grid of displacements and occupations, row-major in
/// `n_bars` then `displacements`.
pub fn gate_error_sweep(
    spec: &ChainSpec,
    pair: (usize, usize),
    displacements: &[f64],
    n_bars: &[f64],
    opts: &GateOptions,
) -> Result<Vec<GateOutcome>, ChainError> {
    let grid: Vec<(f64, f64)> = n_bars
        .iter()
        .flat_map(|&n| displacements.iter().map(move |&d| (d, n)))
        .collect();
    grid.par_iter()
        .map(|&(d, n)| gate_error_with(spec, pair, d, n, opts))
        .collect()
}

/// Largest trace distance, over product input states, between the qubit
/// state after a loop-closed two-ion force (strengths `Ω` and `ζΩ`,
/// `Ω/δ = 1/2`, duration `2π/δ`) and the state produced by
/// [`magnus_unitary`](crate::magnus_unitary).
pub fn magnus_dynamics_distance(zeta: f64, fock_dim: usize, rel_tol: f64) -> Result<f64, ChainError> {
    let delta = 2.0 * PI * 4e3;
    let omega = 0.5 * delta;
    let duration = 2.0 * PI / delta;
    let spectator = GateIon {
        omega_sb: zeta.abs() * omega,
        phi_grad: if zeta >= 0.0 { PI } else { 0.0 },
        ..GateIon::default()
    };
    let drive = PairDrive {
        schedule: build_schedule(duration, 0, 0.0, 0.0, 0.0)?.without(ToneRole::Dd),
        ions: [GateIon { omega_sb: omega, ..GateIon::default() }, spectator],
        delta,
        omega_m: 2.0 * PI * 1e6,
    };
    let mode = MotionalMode::cold(drive.omega_m, 1e-8);
    let u = crate::magnus_unitary(zeta);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let singles = [
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        [C64::new(h, 0.0), C64::new(h, 0.0)],
        [C64::new(h, 0.0), C64::new(0.0, h)],
    ];
    let inputs: Vec<Array1<C64>> = singles
        .iter()
        .flat_map(|a| singles.iter().map(move |b| Array1::from_iter((0..4).map(|k| a[k / 2] * b[k % 2]))))
        .collect();
    let distances = inputs
        .par_iter()
        .map(|psi| -> Result<f64, ChainError> {
            let q0 = Array2::from_shape_fn((4, 4), |(a, b)| psi[a] * psi[b].conj());
            let (rho0, _) = initial_state(&q0, &mode, fock_dim)?;
            let res = evolve_with(&drive, &mode, &rho0, &EvolveOptions { samples: 10, ..EvolveOptions::with_tol(rel_tol) })?;
            let out = u.dot(psi);
            let want = Array2::from_shape_fn((4, 4), |(a, b)| out[a] * out[b].conj());
            Ok(trace_distance(&partial_trace_motion(&res.rho_final), &want))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(distances.into_iter().fold(0.0, f64::max))
}
