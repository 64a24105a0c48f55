use crate::{HamiltonianError, SpectatorTransition};

/// Second-order level shift `Ω²/(4Δ)` from one tone of Rabi rate `rabi`
/// detuned by `detuning` from a transition.
pub fn ac_stark_shift(rabi: f64, detuning: f64) -> f64 {
    rabi * rabi / (4.0 * detuning)
}

/// Qubit-transition shift per unit squared sideband amplitude: the red tone
/// sits `ω_m` below the qubit and the blue tone `ω_m` above, so a balanced
/// pair cancels and an imbalance `r = blue/red` leaves `(r² − 1)·K` with
/// `K = Ω²/(4ω_m)`.
pub fn pi_shift_per_amp2(carrier_rabi: f64, omega_m: f64) -> f64 {
    ac_stark_shift(carrier_rabi, omega_m)
}

/// Net π-transition shift for blue/red amplitude ratio `r`.
pub fn net_pi_shift(ratio: f64, pi_shift_per_amp2: f64) -> f64 {
    (ratio * ratio - 1.0) * pi_shift_per_amp2
}

/// Summed σ-transition shift from tones at frequency offsets `tone_offsets`
/// (relative to the qubit) acting on each spectator transition.
pub fn sigma_shift(
    spectators: &[SpectatorTransition],
    carrier_rabi: f64,
    tone_offsets: &[f64],
) -> f64 {
    spectators
        .iter()
        .flat_map(|s| {
            tone_offsets
                .iter()
                .map(move |&o| ac_stark_shift(s.rabi_ratio * carrier_rabi, s.detuning - o))
        })
        .sum()
}

/// Blue/red sideband amplitude ratio `r` with `net_pi_shift(r) + sigma_shift = 0`.
pub fn ac_zeeman_imbalance(
    pi_shift_per_amp2: f64,
    sigma_shift: f64,
) -> Result<f64, HamiltonianError> {
    if pi_shift_per_amp2 == 0.0 || !pi_shift_per_amp2.is_finite() {
        return Err(HamiltonianError::InvalidParameter(
            "pi_shift_per_amp2 must be non-zero".into(),
        ));
    }
    let r2 = 1.0 - sigma_shift / pi_shift_per_amp2;
    if r2 < 0.0 {
        return Err(HamiltonianError::InfeasibleCompensation { required_r2: r2 });
    }
    Ok(r2.sqrt())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn balanced_without_sigma_shift() {
        assert_eq!(ac_zeeman_imbalance(123.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn paper_scale_root_matches_bisection() {
        let k = pi_shift_per_amp2(2.0 * PI * 304e3, 2.0 * PI * 5.77e6);
        let sigma = 2.0 * PI * 50.0;
        let r = ac_zeeman_imbalance(k, sigma).unwrap();
        // Independent root of f(r) = (r²−1)K + Δσ on [0, 1].
        let f = |r: f64| net_pi_shift(r, k) + sigma;
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(lo) * f(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((r - 0.5 * (lo + hi)).abs() < 1e-12);
        // K/2π = 304e3²/(4·5.77e6) Hz ≈ 4004.2 Hz.
        assert!((k / (2.0 * PI) - 304e3f64.powi(2) / (4.0 * 5.77e6)).abs() < 1e-9);
        assert!((r - 0.993737).abs() < 1e-5);
    }

    #[test]
    fn doubling_shift_doubles_r2_minus_one() {
        let k = 7.0;
        let r1 = ac_zeeman_imbalance(k, 0.3).unwrap();
        let r2 = ac_zeeman_imbalance(k, 0.6).unwrap();
        assert!(((r2 * r2 - 1.0) - 2.0 * (r1 * r1 - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn infeasible_when_shift_exceeds_range() {
        assert!(matches!(
            ac_zeeman_imbalance(1.0, 2.0),
            Err(HamiltonianError::InfeasibleCompensation { .. })
        ));
        assert!(ac_zeeman_imbalance(0.0, 1.0).is_err());
    }

    #[test]
    fn perturbative_shift_matches_dressed_two_level() {
        // Rotating-frame two-level block [[Δ/2, Ω/2], [Ω/2, −Δ/2]]: the upper
        // dressed level moves by (√(Δ²+Ω²) − Δ)/2 ≈ Ω²/(4Δ).
        let delta = 2.0 * PI * 5.77e6;
        for &omega in &[2.0 * PI * 1e4, 2.0 * PI * 3.04e5] {
            let exact = 0.5 * ((delta * delta + omega * omega).sqrt() - delta);
            let approx = ac_stark_shift(omega, delta);
            let rel = (exact - approx).abs() / exact;
            assert!(rel < (omega / delta).powi(2), "rel {rel}");
        }
    }

    #[test]
    fn sigma_shift_sums_over_tones() {
        let s = SpectatorTransition::new(2.0 * PI * 100e6, 0.5).unwrap();
        let off = 2.0 * PI * 5.77e6;
        let total = sigma_shift(&[s], 1.0e5, &[-off, off]);
        let want = ac_stark_shift(0.5e5, s.detuning + off) + ac_stark_shift(0.5e5, s.detuning - off);
        assert!((total - want).abs() < 1e-12);
    }
}
