/// `½(1 + e^{−2|α|²})`: ground-state population after a state-dependent
/// displacement of magnitude `|α|` from the motional ground state.
pub fn p0_analytic(alpha: f64) -> f64 {
    0.5 * (1.0 + (-2.0 * alpha * alpha).exp())
}

/// Thermal generalisation, `½(1 + e^{−2|α|²(2n̄+1)})`.
pub fn p0_analytic_thermal(alpha: f64, n_bar: f64) -> f64 {
    0.5 * (1.0 + (-2.0 * alpha * alpha * (2.0 * n_bar + 1.0)).exp())
}

/// Displacement magnitude `|α(t)| = Ω sin(δt/2)/δ` of a constant SDF with
/// detuning `δ` (reduces to `Ωt/2` at `δ = 0`).
pub fn sdd_amplitude(omega_sb: f64, delta: f64, t: f64) -> f64 {
    if (delta * t).abs() < 1e-6 {
        0.5 * omega_sb * t * (1.0 - (delta * t).powi(2) / 24.0)
    } else {
        (omega_sb * (0.5 * delta * t).sin() / delta).abs()
    }
}

/// Extra exponent `ṅ̄ ∫₀ᵗ |2α(t')|² dt'` by which symmetric heating damps the
/// spin coherence of a constant SDF.
pub fn heating_decoherence_exponent(omega_sb: f64, delta: f64, t: f64, rate: f64) -> f64 {
    let x = delta * t;
    let integral = if x.abs() < 1e-3 {
        omega_sb * omega_sb * t.powi(3) / 3.0 * (1.0 - x * x / 20.0)
    } else {
        2.0 * (omega_sb / delta).powi(2) * (t - (delta * t).sin() / delta)
    };
    rate * integral
}

/// Duration at which a resonant SDF of strength `Ω` brings `P₀` down to `p0`
/// from the ground state.
pub fn time_for_p0(omega_sb: f64, p0: f64) -> f64 {
    let alpha = (-(2.0 * p0 - 1.0).ln() / 2.0).sqrt();
    2.0 * alpha / omega_sb
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn closed_form_values() {
        assert_eq!(p0_analytic(0.0), 1.0);
        assert!((p0_analytic(1.0) - 0.567_667_641_618_306_3).abs() < 1e-15);
        assert!((p0_analytic(30.0) - 0.5).abs() < 1e-15);
        let a = sdd_amplitude(2.0 * PI * 380.0, 0.0, 1e-3);
        assert!((a - 1.193_805_208_7).abs() < 1e-9);
        assert!((p0_analytic(a) - 0.528_92).abs() < 1e-5);
    }

    #[test]
    fn detuned_loop_closes() {
        let d = 2.0 * PI * 770.0;
        assert!(sdd_amplitude(1e3, d, 2.0 * PI / d) < 1e-12);
        let small = heating_decoherence_exponent(1e3, 1e-9, 1e-3, 100.0);
        let zero = heating_decoherence_exponent(1e3, 0.0, 1e-3, 100.0);
        assert!((small - zero).abs() < 1e-12 * zero);
    }

    #[test]
    fn time_for_p0_inverts() {
        let w = 2.0 * PI * 380.0;
        let t = time_for_p0(w, 0.6);
        assert!((p0_analytic(sdd_amplitude(w, 0.0, t)) - 0.6).abs() < 1e-14);
    }
}
