use chain::*;
use proptest::prelude::*;

fn spec() -> ChainSpec {
    ChainSpec::reference()
}

#[test]
fn symmetric_pair_gets_symmetric_currents() {
    let sol = optimize_currents(&spec(), (5, 11)).unwrap();
    let rel = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs());
    assert!(rel(sol.sb_currents[0], sol.sb_currents[2]), "{:?}", sol.sb_currents);
    assert!(rel(sol.dd_currents[0], sol.dd_currents[2]), "{:?}", sol.dd_currents);
}

#[test]
fn off_centre_pair_is_in_phase_only_at_the_addressed_ions() {
    let sol = optimize_currents(&spec(), (4, 7)).unwrap();
    assert!(sol.converged);
    for (k, d) in sol.ions.iter().enumerate() {
        let c = (d.phi_grad - d.phi_dd).cos().abs();
        if sol.is_addressed(k) {
            assert!(c > 1.0 - 1e-9, "ion {k}: {c}");
        } else {
            assert!(c < 1e-2, "ion {k}: {c}");
        }
    }
}

#[test]
fn exact_antiphase_leaves_exact_quadrature() {
    let mut s = spec();
    s.epsilon = 0.0;
    for pair in [(0, 1), (4, 7), (2, 15), (8, 12)] {
        let sol = optimize_currents(&s, pair).unwrap();
        for (k, d) in sol.ions.iter().enumerate() {
            if !sol.is_addressed(k) && d.omega_dd > 0.0 {
                let c = (d.phi_grad - d.phi_dd).cos();
                assert!(c.abs() < 1e-12, "{pair:?} ion {k}: {c}");
            }
        }
        let ct = pair_crosstalk(&s, pair).unwrap();
        assert!(ct.max_crosstalk < 1e-20, "{pair:?}: {}", ct.max_crosstalk);
    }
}

#[test]
fn crosstalk_scales_with_the_square_of_the_phase_error() {
    let mut a = spec();
    a.epsilon = 3e-5;
    let mut b = spec();
    b.epsilon = 3e-6;
    let (ca, cb) = (pair_crosstalk(&a, (4, 7)).unwrap(), pair_crosstalk(&b, (4, 7)).unwrap());
    let ratio = ca.mean_crosstalk / cb.mean_crosstalk;
    assert!((ratio - 100.0).abs() < 1.0, "{ratio}");
}

#[test]
fn dd_ratio_meets_the_quadrature_floor() {
    let sol = optimize_currents(&spec(), (2, 9)).unwrap();
    let worst = (0..17)
        .filter(|&k| !sol.is_addressed(k))
        .map(|k| sol.ions[k].quadrature_floor)
        .fold(0.0, f64::max);
    assert!((worst - 7e-5).abs() < 1e-12, "{worst}");
}

#[test]
fn map_covers_all_pairs_with_bounded_values() {
    let r = chain_crosstalk_map(&spec()).unwrap();
    assert_eq!(r.pairs.len(), 17 * 16 / 2);
    assert_eq!(r.unconverged_pairs, 0);
    for p in &r.pairs {
        assert!(p.per_ion.iter().all(|&v| (0.0..=1.0 / 3.0).contains(&v)));
        assert!(p.i < p.j && !matches!(p.worst_ion, w if w == p.i || w == p.j));
    }
    assert!(r.chain_mean <= r.mean_of_max && r.mean_of_max <= r.max);
    let again = chain_crosstalk_map(&spec()).unwrap();
    assert_eq!(r, again);
}

#[test]
fn neighbouring_pairs_get_worse_towards_the_chain_ends() {
    let r = chain_crosstalk_map(&spec()).unwrap();
    let nn: Vec<f64> = (0..16)
        .map(|i| r.pairs.iter().find(|p| p.i == i && p.j == i + 1).unwrap().mean_crosstalk)
        .collect();
    let outer = (nn[0] + nn[1] + nn[14] + nn[15]) / 4.0;
    let inner = (nn[6] + nn[7] + nn[8] + nn[9]) / 4.0;
    assert!(outer > 3.0 * inner, "outer {outer:e} inner {inner:e}");
}

#[test]
fn report_serializes() {
    let mut s = spec();
    s.n_ions = 5;
    s.spacing = 10e-6;
    let r = chain_crosstalk_map(&s).unwrap();
    let back: CrosstalkReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);
    let mut buf = Vec::new();
    write_pair_matrix_csv(&r, PairMetric::Max, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0], "ion,0,1,2,3,4");
    assert!(lines[1].starts_with("0,,"));
    let spec_back: ChainSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(spec_back, s);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn scaling_sideband_currents_preserves_zeta(i in 0usize..17, j in 0usize..17, c in 0.1f64..10.0) {
        prop_assume!(i != j);
        let s = spec();
        let sol = optimize_currents(&s, (i, j)).unwrap();
        let scaled: Vec<f64> = sol.sb_currents.iter().map(|v| v * c).collect();
        let base = ion_drives(&s, &sol.sb_currents, &sol.dd_currents).unwrap();
        let up = ion_drives(&s, &scaled, &sol.dd_currents).unwrap();
        let norm = |d: &[IonDrive]| 0.5 * (d[i].omega_sb + d[j].omega_sb);
        for (a, b) in base.iter().zip(&up) {
            prop_assert!((b.omega_res - c * a.omega_res).abs() <= 1e-9 * a.omega_sb.max(1e-300) * c);
            let (za, zb) = (a.omega_res / norm(&base), b.omega_res / norm(&up));
            prop_assert!((za - zb).abs() <= 1e-12 * (1.0 + za.abs()));
        }
    }

    #[test]
    fn pair_order_does_not_matter(i in 0usize..17, j in 0usize..17) {
        prop_assume!(i != j);
        let s = spec();
        let a = pair_crosstalk(&s, (i, j)).unwrap();
        let b = pair_crosstalk(&s, (j, i)).unwrap();
        for (x, y) in a.per_ion.iter().zip(&b.per_ion) {
            prop_assert!((x - y).abs() <= 1e-18 + 1e-8 * x.max(*y), "{x:e} vs {y:e}");
        }
    }
}
