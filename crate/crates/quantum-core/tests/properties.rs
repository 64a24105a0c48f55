use ndarray::{Array1, Array2};
use proptest::prelude::*;
use quantum_core::*;

fn overlap(a: &Array1<C64>, b: &Array1<C64>) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

proptest! {
    #[test]
    fn coherent_overlap_is_gaussian(
        ar in -1.4f64..1.4, ai in -1.4f64..1.4,
        br in -1.4f64..1.4, bi in -1.4f64..1.4,
    ) {
        let a = c64(ar, ai);
        let b = c64(br, bi);
        prop_assume!(a.norm() <= 2.0 && b.norm() <= 2.0);
        let (pa, _) = coherent_state(CoherentAmplitude::new(a), 30).unwrap();
        let (pb, _) = coherent_state(CoherentAmplitude::new(b), 30).unwrap();
        let got = overlap(&pa, &pb).norm_sqr();
        let want = (-(a - b).norm_sqr()).exp();
        prop_assert!((got - want).abs() < 1e-8, "got {got}, want {want}");
    }

    #[test]
    fn ladder_matrix_elements(fock_dim in 2usize..40) {
        let ops = fock_operators(fock_dim).unwrap();
        let a = ops.a.data();
        for m in 0..fock_dim {
            for n in 0..fock_dim {
                let want = if m + 1 == n { (n as f64).sqrt() } else { 0.0 };
                prop_assert_eq!(a[[m, n]], c64(want, 0.0));
            }
        }
    }

    #[test]
    fn partial_trace_inverts_embedding(
        x in -0.5f64..0.5, y in -0.5f64..0.5, z in -0.5f64..0.5, fock_dim in 2usize..12,
    ) {
        let q = (pauli(Pauli::I)
            + pauli(Pauli::X).mapv(|v| v * x)
            + pauli(Pauli::Y).mapv(|v| v * y)
            + pauli(Pauli::Z).mapv(|v| v * z))
            .mapv(|v| v * 0.5);
        let rho = DensityMatrix::product_ground(&q, fock_dim).unwrap();
        let back = partial_trace_motion(&rho);
        prop_assert!(max_abs(&(back - q)) < 1e-14);
    }

    #[test]
    fn purity_bounds(seed in proptest::collection::vec(-1.0f64..1.0, 2 * 2 * 2 * 6 * 6)) {
        // ρ = G G† / Tr(G G†) for a random complex G is a valid density matrix.
        let fock_dim = 6;
        let n = 2 * fock_dim;
        let g = Array2::from_shape_fn((n, n), |(i, j)| {
            c64(seed[2 * (i * n + j)], seed[2 * (i * n + j) + 1])
        });
        let m = g.dot(&dagger(&g));
        let tr = m.diag().sum();
        let rho = DensityMatrix::new(
            OperatorMatrix::new(m.mapv(|v| v / tr), Dims::new(2, fock_dim)).unwrap(),
        ).unwrap();
        rho.validate().unwrap();
        let p = purity(&rho);
        prop_assert!(p >= 1.0 / n as f64 - 1e-10 && p <= 1.0 + 1e-10);
    }

    #[test]
    fn thermal_mean_matches(n_bar in 0.0f64..2.0) {
        let (rho, warn) = thermal_state(n_bar, 60).unwrap();
        prop_assert!(warn.is_none());
        prop_assert!((rho.mean_phonons() - n_bar).abs() < 1e-6);
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
    }
}

#[test]
fn maximally_mixed_register_has_minimum_purity() {
    let fock_dim = 5;
    let n = 2 * fock_dim;
    let m = identity(n).mapv(|v| v / n as f64);
    let rho = DensityMatrix::new(OperatorMatrix::new(m, Dims::new(2, fock_dim)).unwrap()).unwrap();
    assert!((purity(&rho) - 1.0 / n as f64).abs() < 1e-14);
}
