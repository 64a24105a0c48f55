//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary:
//! `cargo test -p cli --test acceptance`. Exits non-zero if any
//! criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use benchmarking::{ms_pulse_channel, run_rb, ChannelOptions, Embedded, MsPulse, RbConfig, RbScenario};
use chain::*;
use fieldmodel::{field_at, phase_profile, TiltProfile, TrapGeometry};
use hamiltonians::{build_dd, build_sdf, DriveParams};
use lindblad::*;
use ndarray::Array2;
use num_complex::Complex64 as C64;
use pulses::{build_schedule, walsh_signs, PulseSchedule, ToneRole};
use quantum_core::{commutator, fock_operators, max_abs};

const OMEGA_SB: f64 = 2.0 * PI * 380.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn mode() -> MotionalMode {
    MotionalMode::cold(2.0 * PI * 5.77e6, 4.513e-9)
}

fn ground() -> Array2<C64> {
    let mut q = Array2::zeros((2, 2));
    q[[0, 0]] = C64::new(1.0, 0.0);
    q
}

fn within_factor(x: f64, target: f64, f: f64) -> bool {
    x >= target / f && x <= target * f
}

fn sdf_only(duration: f64) -> PulseSchedule {
    build_schedule(duration, 0, 0.0, 0.0, 0.0)
        .unwrap()
        .without(ToneRole::Dd)
}

fn ac1() -> Outcome {
    let t = 5.0 / OMEGA_SB;
    let p = DriveParams {
        omega_sb: OMEGA_SB,
        ..DriveParams::default()
    };
    let m = mode();
    let (rho0, _) = initial_state(&ground(), &m, 30).unwrap();
    let r = evolve(&sdf_only(t), &p, &m, &rho0, 1e-8).unwrap();
    let worst = r
        .observables
        .iter()
        .map(|o| (o.p0 - p0_analytic(sdd_amplitude(OMEGA_SB, 0.0, o.t))).abs())
        .fold(0.0, f64::max);
    outcome(
        worst <= 1e-6,
        format!("max |P0 - closed form| = {worst:.2e} over alpha in [0, 2.5] (tol 1e-6)"),
    )
}

fn ac2() -> Outcome {
    let t = time_for_p0(OMEGA_SB, 0.6);
    let s = build_schedule(t, 3, 120e-9, 2.4e-6, 0.0).unwrap();
    let m = mode();
    let run = |phi_dd: f64| {
        let p = DriveParams {
            omega_sb: OMEGA_SB,
            omega_dd: 60.0 * OMEGA_SB,
            phi_dd,
            ..DriveParams::default()
        };
        let d = SingleIonDrive::new(s.clone(), p, m.omega_m);
        evolve_guarded(&d, &m, &ground(), 30, &EvolveOptions::with_tol(1e-8))
            .unwrap()
            .final_p0()
    };
    let (p_in, p_quad) = (run(0.0), run(FRAC_PI_2));
    outcome(
        p_quad >= 0.99 && (p_in - 0.6).abs() <= 0.01,
        format!("P0(phi=pi/2) = {p_quad:.5} (>= 0.99), P0(phi=0) = {p_in:.5} (0.60 +- 0.01)"),
    )
}

fn ac3() -> Outcome {
    let s = SuppressionScenario::reference(2.0 * PI * 5.77e6, 4.513e-9);
    let ratios: Vec<f64> = (1..=10).map(|k| 10.0 * k as f64).collect();
    let points = suppression_error_scan(&ratios, &s).unwrap();
    let coeffs: Vec<f64> = points.iter().map(|p| p.envelope_coefficient).collect();
    let pass = coeffs.iter().all(|&c| (0.5..=2.0).contains(&c));
    let raw: Vec<String> = points
        .iter()
        .map(|p| format!("{:.2}", p.max_error * p.ratio * p.ratio / 8.0))
        .collect();
    let shown: Vec<String> = coeffs.iter().map(|c| format!("{c:.3}")).collect();
    outcome(
        pass,
        format!(
            "max (1-P0) r^2/8 over each neighbourhood, r = 10..100: [{}] (need 0.5..2); raw max/(8 r^-2): [{}]",
            shown.join(", "),
            raw.join(", ")
        ),
    )
}

fn ac4() -> Outcome {
    let worst = (0..50)
        .map(|k| {
            let z = k as f64 / 49.0;
            (spectator_impurity(&magnus_unitary(z)) - crosstalk(z)).abs()
        })
        .fold(0.0, f64::max);
    outcome(worst <= 1e-10, format!("max |brute - formula| = {worst:.2e} over 50 zeta (tol 1e-10)"))
}

fn ac5() -> Outcome {
    let d = magnus_dynamics_distance(0.05, 12, 1e-9).unwrap();
    outcome(d <= 1e-4, format!("trace distance {d:.2e} at zeta = 0.05 (tol 1e-4)"))
}

fn ac6() -> Outcome {
    let r = chain_crosstalk_map(&ChainSpec::reference()).unwrap();
    let nn: Vec<f64> = (0..16)
        .map(|i| r.pairs.iter().find(|p| p.i == i && p.j == i + 1).unwrap().mean_crosstalk)
        .collect();
    let outer = (nn[0] + nn[1] + nn[14] + nn[15]) / 4.0;
    let inner = (nn[6] + nn[7] + nn[8] + nn[9]) / 4.0;
    let magnitude = within_factor(r.chain_mean, 1.04e-5, 3.0);
    let pattern = outer > inner && r.unconverged_pairs == 0;
    outcome(
        magnitude && pattern,
        format!(
            "chain mean {:.3e} (target 1.04e-5 within 3x: {}); mean of per-pair max {:.3e}; \
             adjacent pairs outer/inner {:.3e}/{:.3e} ({})",
            r.chain_mean,
            if magnitude { "ok" } else { "no" },
            r.mean_of_max,
            outer,
            inner,
            if pattern { "rises outward" } else { "no outward rise" }
        ),
    )
}

fn ac7() -> Outcome {
    let spec = ChainSpec::reference();
    let opts = GateOptions::default();
    let at = |d: f64, n: f64| gate_error_with(&spec, (4, 7), d, n, &opts).unwrap().infidelity;
    let (e0, e5, e_hot) = (at(0.0, 0.0), at(5e-9, 0.0), at(0.0, 0.3));
    let delta = e_hot - e0;
    let a = within_factor(e0, 3.8e-5, 3.0);
    let b = e5 > 1e-3;
    let c = within_factor(delta, 2.7e-4, 3.0);
    let tag = |ok: bool| if ok { "ok" } else { "no" };
    outcome(
        a && b && c,
        format!(
            "d=0: {e0:.3e} (3.8e-5 within 3x: {}); d=5nm: {e5:.3e} (> 1e-3: {}); \
             n=0.3 increase: {delta:.3e} (2.7e-4 within 3x: {})",
            tag(a),
            tag(b),
            tag(c)
        ),
    )
}

/// Output of the bare pulse channel for `|0⟩⟨0|` and the σ_y eigenstate.
fn ms_outputs(rate: f64, fock_dim: usize) -> (f64, f64, f64) {
    let pulse = MsPulse::bare(OMEGA_SB, 2.0 * PI * 770.0, 1.30e-3);
    let m = RbScenario::reference_mode().with_heating(rate);
    let opts = ChannelOptions {
        fock_dim,
        ..ChannelOptions::default()
    };
    let ch = ms_pulse_channel(&pulse, &m, &opts).unwrap().channel;
    let zero = ch.apply(&ground());
    let h = C64::new(0.5, 0.0);
    let plus_i = Array2::from_shape_vec((2, 2), vec![h, -C64::i() * h, C64::i() * h, h]).unwrap();
    let y = ch.apply(&plus_i);
    (zero[[0, 0]].re, zero[[1, 1]].re, y[[1, 0]].im)
}

fn ac8() -> Outcome {
    let (p0, p1, c) = ms_outputs(370.0, 24);
    let pass = (p0 - 0.61).abs() <= 0.02 && (p1 - 0.39).abs() <= 0.02 && (c - 0.11).abs() <= 0.02;
    let (q0, q1, d) = ms_outputs(2.0 * PI * 370.0, 40);
    outcome(
        pass,
        format!(
            "heating 370/s: diag ({p0:.4}, {p1:.4}), coherence {c:.4}i (target (0.61, 0.39), 0.11i +- 0.02); \
             info: at 2pi*370/s diag ({q0:.4}, {q1:.4}), coherence {d:.4}i"
        ),
    )
}

fn ac9() -> Outcome {
    let cfg = RbConfig::default();
    let suppressed = RbScenario::reference(Embedded::Ms(MsPulse::reference(FRAC_PI_2)));
    let r = run_rb(&suppressed, &cfg, &ChannelOptions::default()).unwrap();
    let control = RbScenario::reference(Embedded::Ms(MsPulse::reference(0.0)));
    let opts = ChannelOptions {
        fock_dim: 32,
        ..ChannelOptions::default()
    };
    let c = run_rb(&control, &cfg, &opts).unwrap();
    let eps = r.fit.as_ref().map_or(f64::NAN, |f| f.epsilon);
    let ci = r.fit.as_ref().map_or(f64::NAN, |f| f.epsilon_ci);
    let last = c.points.last().unwrap();
    let in_bracket = (2.1e-5..=3.0e-4).contains(&eps);
    let saturated = (last.mean_error - 0.5).abs() <= 0.02;
    outcome(
        in_bracket && saturated,
        format!(
            "suppressed eps = {eps:.3e} +- {ci:.1e} (bracket [2.1e-5, 3.0e-4]); \
             control error at L={} = {:.4} +- {:.4} (0.5 +- 0.02); {} seeds x {} lengths",
            last.length,
            last.mean_error,
            last.ci,
            cfg.n_seeds,
            cfg.lengths.len()
        ),
    )
}

fn ac10() -> Outcome {
    let mut moments_ok = true;
    for (order, degree) in [(1u32, 0u32), (3, 1), (7, 2), (15, 3)] {
        let w = walsh_signs(order).unwrap();
        moments_ok &= (0..=degree).all(|k| w.moment(k) == 0);
    }
    let m = mode();
    let (rho0, _) = initial_state(&ground(), &m, 4).unwrap();
    let infidelity = |order: u32| {
        let s = build_schedule(0.75e-3, order, 120e-9, 2.4e-6, 0.0)
            .unwrap()
            .without(ToneRole::RedSideband)
            .without(ToneRole::BlueSideband);
        let p = DriveParams {
            omega_dd: 60.0 * OMEGA_SB,
            phi_dd: FRAC_PI_2,
            ..DriveParams::default()
        };
        let d = SingleIonDrive::new(s, p, m.omega_m).with_options(DriveOptions {
            dd_linear_drift: 0.01,
            ..DriveOptions::default()
        });
        1.0 - evolve_with(&d, &m, &rho0, &EvolveOptions::with_tol(1e-10))
            .unwrap()
            .final_p0()
    };
    let (w1, w3) = (infidelity(1), infidelity(3));
    outcome(
        moments_ok && w1 - w3 > 1e-6,
        format!(
            "moments cancel for orders 1/3/7/15: {moments_ok}; 1% drift infidelity walsh-1 {w1:.2e}, walsh-3 {w3:.2e}"
        ),
    )
}

fn ac11() -> Outcome {
    let geom = TrapGeometry::two_wire(50e-6, 40e-6, 0.856, 0.0480).unwrap();
    let x: Vec<f64> = (0..401).map(|k| -20e-6 + 40e-6 * k as f64 / 400.0).collect();
    let p = phase_profile(&geom, &x, 4.513e-9, &TiltProfile::constant(0.0)).unwrap();
    let sweep = (p.phi_field[p.len() - 1] - p.phi_field[0]).abs();
    let g0 = p.phi_grad[0];
    let grad_spread = p.phi_grad.iter().map(|g| (g - g0).abs()).fold(0.0, f64::max);
    let eta = field_at(&geom, 0.0, 4.513e-9, 0.0).unwrap().eta;
    let pass = (sweep - PI).abs() < 0.35 && grad_spread < 0.1 && within_factor(eta, 1.25e-3, 3.0);
    outcome(
        pass,
        format!("field phase sweep {sweep:.3} rad (~pi), gradient phase spread {grad_spread:.3} rad (< 0.1), eta(0) = {eta:.3e} (1.25e-3 within 3x)"),
    )
}

fn ac12() -> Outcome {
    let mut checks = Vec::new();

    let mut worst_trace: f64 = 0.0;
    let mut worst_herm: f64 = 0.0;
    let mut worst_eig: f64 = 0.0;
    for (k, &(ratio, phi, delta_hz, n_bar, rate)) in [
        (0.0, 0.0, 0.0, 0.0, 370.0),
        (20.0, 1.1, 770.0, 0.2, 500.0),
        (35.0, FRAC_PI_2, 300.0, 0.4, 100.0),
    ]
    .iter()
    .enumerate()
    {
        let m = mode().with_n_bar(n_bar).with_heating(rate);
        let s = build_schedule(4e-4, [0u32, 1, 3][k], 120e-9, 2.4e-6, 0.0).unwrap();
        let p = DriveParams {
            omega_sb: OMEGA_SB,
            omega_dd: ratio * OMEGA_SB,
            delta: 2.0 * PI * delta_hz,
            phi_dd: phi,
            ..DriveParams::default()
        };
        let d = SingleIonDrive::new(s, p, m.omega_m);
        let (rho0, _) = initial_state(&ground(), &m, 14).unwrap();
        let opts = EvolveOptions {
            samples: 20,
            check_positivity: true,
            ..EvolveOptions::with_tol(1e-8)
        };
        let r = evolve_with(&d, &m, &rho0, &opts).unwrap();
        worst_trace = worst_trace.max(r.stats.max_trace_deviation);
        worst_herm = worst_herm.max(r.stats.max_hermiticity_defect);
        worst_eig = worst_eig.min(r.stats.min_eigenvalue.unwrap());
    }
    checks.push((
        "trace/hermiticity/positivity",
        worst_trace <= 1e-7 && worst_herm <= 1e-10 && worst_eig >= -1e-8,
    ));

    let m = mode().with_n_bar(0.3).with_heating(370.0);
    let (rho0, _) = initial_state(&ground(), &m, 40).unwrap();
    let r = evolve(&PulseSchedule::delay(2e-3), &DriveParams::default(), &m, &rho0, 1e-9).unwrap();
    let linear = r
        .observables
        .iter()
        .all(|o| (o.n_mean - (0.3 + 370.0 * o.t)).abs() <= 1e-6 * (0.3 + 370.0 * o.t));
    checks.push(("heating linearity", linear));

    let ops = fock_operators(6).unwrap();
    let commute = (-3..=3).all(|k| {
        let p = DriveParams {
            omega_sb: OMEGA_SB,
            omega_dd: 1e4,
            phi_dd: k as f64 * PI,
            ..DriveParams::default()
        };
        max_abs(&commutator(build_sdf(&p, 0.0, &ops).data(), build_dd(&p, &ops).data())) <= 1e-12 * OMEGA_SB * 1e4
    });
    checks.push(("commutator at phi_DD = k pi", commute));

    let spec = ChainSpec::reference();
    let scale_ok = [(2usize, 9usize), (0, 16), (7, 8)].iter().all(|&(i, j)| {
        let sol = optimize_currents(&spec, (i, j)).unwrap();
        let base = ion_drives(&spec, &sol.sb_currents, &sol.dd_currents).unwrap();
        let scaled: Vec<f64> = sol.sb_currents.iter().map(|v| 3.7 * v).collect();
        let up = ion_drives(&spec, &scaled, &sol.dd_currents).unwrap();
        let norm = |d: &[IonDrive]| 0.5 * (d[i].omega_sb + d[j].omega_sb);
        base.iter().zip(&up).all(|(a, b)| {
            let (za, zb) = (a.omega_res / norm(&base), b.omega_res / norm(&up));
            (za - zb).abs() <= 1e-12 * (1.0 + za.abs())
        })
    });
    checks.push(("current-scaling invariance of zeta", scale_ok));

    let p = DriveParams {
        omega_sb: OMEGA_SB,
        ..DriveParams::default()
    };
    let d = SingleIonDrive::new(sdf_only(1e-3), p, mode().omega_m);
    let opts = EvolveOptions {
        samples: 20,
        ..EvolveOptions::default()
    };
    let accepts = evolve_guarded(&d, &mode(), &ground(), 30, &opts).is_ok();
    let rejects = matches!(
        evolve_guarded(&d, &mode(), &ground(), 3, &opts),
        Err(EvolveError::Convergence { .. })
    );
    checks.push(("truncation guard", accepts && rejects));

    let pass = checks.iter().all(|c| c.1);
    let detail: Vec<String> = checks
        .iter()
        .map(|(name, ok)| format!("{name}: {}", if *ok { "ok" } else { "FAILED" }))
        .collect();
    outcome(pass, detail.join("; "))
}

fn main() {
    type Criterion = (u32, &'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 12] = [
        (1, "analytic decay", 10, ac1),
        (2, "phase-selective suppression", 60, ac2),
        (3, "suppression scaling", 300, ac3),
        (4, "crosstalk formula oracle", 1, ac4),
        (5, "Magnus vs dynamics", 120, ac5),
        (6, "chain mean crosstalk", 600, ac6),
        (7, "position sensitivity", 600, ac7),
        (8, "MS channel", 60, ac8),
        (9, "RB bracket", 600, ac9),
        (10, "Walsh properties", 60, ac10),
        (11, "field model", 1, ac11),
        (12, "property suite", 300, ac12),
    ];
    // Panics are reported on the criterion's line.
    std::panic::set_hook(Box::new(|_| {}));
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, budget, f) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f));
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let (pass, detail) = match result {
            Ok(o) => (o.pass && in_time, o.detail),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        if !pass {
            failed += 1;
        }
        println!(
            "AC{id:<2} {} {name}: {detail} [{:.1} s, budget {budget} s{}]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over budget" }
        );
    }
    println!("{failed} criteria failed");
    if failed > 0 {
        std::process::exit(1);
    }
}
