use std::f64::consts::PI;

use benchmarking::*;
use lindblad::MotionalMode;

fn fast_pulse() -> MsPulse {
    MsPulse {
        omega_sb: 2.0 * PI * 2e3,
        delta: 2.0 * PI * 4e3,
        duration: 250e-6,
        omega_dd: 2.0 * PI * 200e3,
        phi_dd: 0.5 * PI,
        walsh_order: 3,
        ramp: 1e-6,
        walsh_delay: 0.0,
        drive_time_phase: true,
    }
}

fn fast_scenario(rate: f64) -> RbScenario {
    RbScenario {
        embedded: Embedded::Ms(fast_pulse()),
        mode: MotionalMode::cold(2.0 * PI * 1e6, 10e-9).with_heating(rate),
        pair_duration: 300e-6,
    }
}

fn fast_opts() -> ChannelOptions {
    ChannelOptions {
        fock_dim: 24,
        ..ChannelOptions::default()
    }
}

fn rb_config(base_seed: u64) -> RbConfig {
    RbConfig {
        lengths: vec![1, 5, 10, 20],
        n_seeds: 10,
        base_seed,
    }
}

#[test]
fn identity_channel_gives_zero_error() {
    for rate in [0.0, 370.0] {
        let sc = RbScenario {
            embedded: Embedded::None,
            mode: RbScenario::reference_mode().with_heating(rate),
            pair_duration: 1.78e-3,
        };
        let r = run_rb(&sc, &RbConfig::default(), &ChannelOptions::default()).unwrap();
        assert!(r.points.iter().all(|p| p.mean_error < 1e-12));
        let fit = r.fit.expect("fit converges on perfect data");
        assert!(fit.epsilon.abs() <= 1e-9, "ε = {}", fit.epsilon);
        assert_eq!(r.heating_model, HeatingModel::Static);
    }
}

#[test]
fn idle_motion_leaves_the_qubit_alone() {
    let sc = RbScenario::reference(Embedded::Delay {
        duration: 1.66e-3,
        qubit_detuning: 0.0,
    });
    let r = run_rb(&sc, &RbConfig::default(), &ChannelOptions::default()).unwrap();
    assert!(r.points.iter().all(|p| p.mean_error < 1e-9));
}

#[test]
fn closed_loop_without_heating_is_identity() {
    let delta = 2.0 * PI * 770.0;
    let pulse = MsPulse::bare(2.0 * PI * 380.0, delta, 2.0 * PI / delta);
    let mode = MotionalMode::cold(2.0 * PI * 5.77e6, 10e-9);
    let r = ms_pulse_channel(&pulse, &mode, &ChannelOptions::default()).unwrap();
    assert!(r.channel.distance(&QubitChannel::identity()) < 1e-6);
}

#[test]
fn heated_channels_are_cp_and_tp() {
    let pulse = MsPulse::bare(2.0 * PI * 380.0, 2.0 * PI * 770.0, 1.30e-3);
    for n_bar in [0.0, 0.7] {
        let mode = RbScenario::reference_mode().with_n_bar(n_bar);
        let r = ms_pulse_channel(&pulse, &mode, &ChannelOptions::default()).unwrap();
        assert!(r.min_choi_eigenvalue >= -1e-8, "{}", r.min_choi_eigenvalue);
        assert!(r.trace_defect <= 1e-8, "{}", r.trace_defect);
        assert!(r.channel.infidelity() > 0.01);
    }
    let r = ms_pulse_channel(&fast_pulse(), &fast_scenario(370.0).mode, &fast_opts()).unwrap();
    assert!(r.min_choi_eigenvalue >= -1e-8 && r.trace_defect <= 1e-8);
}

#[test]
fn unsuppressed_pulse_is_worse_than_suppressed() {
    let mode = fast_scenario(370.0).mode;
    let on = ms_pulse_channel(&fast_pulse(), &mode, &fast_opts()).unwrap();
    let off = ms_pulse_channel(
        &MsPulse {
            phi_dd: 0.0,
            ..fast_pulse()
        },
        &mode,
        &fast_opts(),
    )
    .unwrap();
    assert!(off.channel.infidelity() > 10.0 * on.channel.infidelity());
}

#[test]
fn error_grows_with_heating_rate() {
    let eps: Vec<f64> = [0.0, 100.0, 370.0]
        .iter()
        .map(|&rate| {
            let r = run_rb(&fast_scenario(rate), &rb_config(0), &fast_opts()).unwrap();
            assert!(r.min_choi_eigenvalue >= -1e-8);
            r.fit.expect("fit converges").epsilon
        })
        .collect();
    assert!(eps[0] <= eps[1] && eps[1] <= eps[2], "{eps:?}");
    assert!(eps[2] > eps[0]);
}

#[test]
fn fitted_error_is_exchangeable_over_seeds() {
    let sc = fast_scenario(370.0);
    let chans = pair_channels(&sc, 20, &fast_opts()).unwrap();
    assert_eq!(chans.model, HeatingModel::Affine);
    let a = run_rb_with_channels(&sc, &rb_config(0), &chans).unwrap();
    let b = run_rb_with_channels(&sc, &rb_config(1000), &chans).unwrap();
    let (fa, fb) = (a.fit.as_ref().unwrap(), b.fit.as_ref().unwrap());
    let tol = 3.0 * (fa.epsilon_ci.powi(2) + fb.epsilon_ci.powi(2)).sqrt();
    assert!((fa.epsilon - fb.epsilon).abs() <= tol, "{} vs {} (±{tol})", fa.epsilon, fb.epsilon);
    let again = run_rb_with_channels(&sc, &rb_config(0), &chans).unwrap();
    assert_eq!(a, again);
}

#[test]
fn detuned_delay_is_a_small_coherent_error() {
    let sc = RbScenario::reference(Embedded::Delay {
        duration: 1.66e-3,
        qubit_detuning: 2.0 * PI * 1.3,
    });
    let r = run_rb(&sc, &RbConfig::default(), &ChannelOptions::default()).unwrap();
    let eps = r.fit.unwrap().epsilon;
    // A z rotation by θ has average infidelity sin²(θ/2)·2/3.
    let theta: f64 = 2.0 * PI * 1.3 * 1.66e-3;
    let per_pair = (0.5 * theta).sin().powi(2) * 2.0 / 3.0;
    assert!((r.first_pair_infidelity - per_pair).abs() < 1e-9);
    assert!(eps > 0.1 * per_pair && eps < 10.0 * per_pair, "{eps} vs {per_pair}");
}

#[test]
fn results_serialize_and_export() {
    let sc = RbScenario::reference(Embedded::None);
    let r = run_rb(&sc, &RbConfig::default(), &ChannelOptions::default()).unwrap();
    let json = serde_json::to_string(&r).unwrap();
    let back: RbResult = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
    let mut buf = Vec::new();
    write_rb_csv(&r, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("length,mean_error,ci,survival\n1,"));
    assert_eq!(text.lines().count(), 6);
}
