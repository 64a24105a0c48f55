use hamiltonians::SpinBosonTerms;
use ndarray::Array2;
use num_complex::Complex64 as C64;
use quantum_core::{fock_operators, OperatorMatrix};

const I: C64 = C64::new(0.0, 1.0);

#[inline]
fn axpy(out: &mut [C64], a: C64, x: &[C64]) {
    for (o, v) in out.iter_mut().zip(x) {
        *o += a * v;
    }
}

/// `dρ/dt` for `H = B⊗1 + L⊗a + L†⊗a†` plus symmetric heating at `rate`.
///
/// `rho`, `out` and `scratch` are row-major `D×D` with `D = d·fock` and
/// index `q·fock + n`. The truncated `aa†` has a zero last diagonal entry,
/// which makes the truncated dissipator exactly trace preserving.
pub fn master_rhs(
    terms: &SpinBosonTerms,
    rate: f64,
    fock: usize,
    rho: &[C64],
    out: &mut [C64],
    scratch: &mut [C64],
) {
    let d = terms.qubit_dim();
    let dim = d * fock;
    debug_assert_eq!(rho.len(), dim * dim);
    let sq: Vec<f64> = (0..=fock).map(|k| (k as f64).sqrt()).collect();

    // scratch = Hρ, built row by row from the block structure of H.
    scratch.fill(C64::new(0.0, 0.0));
    for q in 0..d {
        for m in 0..fock {
            let row = (q * fock + m) * dim;
            let x = &mut scratch[row..row + dim];
            for r in 0..d {
                let b = terms.bare[[q, r]];
                if b != C64::new(0.0, 0.0) {
                    let src = (r * fock + m) * dim;
                    axpy(x, b, &rho[src..src + dim]);
                }
                let l = terms.lower[[q, r]];
                if m + 1 < fock && l != C64::new(0.0, 0.0) {
                    let src = (r * fock + m + 1) * dim;
                    axpy(x, l * sq[m + 1], &rho[src..src + dim]);
                }
                let ld = terms.lower[[r, q]].conj();
                if m >= 1 && ld != C64::new(0.0, 0.0) {
                    let src = (r * fock + m - 1) * dim;
                    axpy(x, ld * sq[m], &rho[src..src + dim]);
                }
            }
        }
    }

    // −i[H, ρ] = −i(Hρ − (Hρ)†) for Hermitian ρ.
    for i in 0..dim {
        for j in 0..dim {
            out[i * dim + j] = -I * (scratch[i * dim + j] - scratch[j * dim + i].conj());
        }
    }

    if rate > 0.0 {
        let e = |k: usize| if k + 1 < fock { (k + 1) as f64 } else { 0.0 };
        for i in 0..dim {
            let m = i % fock;
            for j in 0..dim {
                let n = j % fock;
                let idx = i * dim + j;
                let mut acc = -0.5 * (m as f64 + n as f64 + e(m) + e(n)) * rho[idx];
                if m + 1 < fock && n + 1 < fock {
                    acc += sq[m + 1] * sq[n + 1] * rho[idx + dim + 1];
                }
                if m >= 1 && n >= 1 {
                    acc += sq[m] * sq[n] * rho[idx - dim - 1];
                }
                out[idx] += rate * acc;
            }
        }
    }
}

/// Reference right-hand side from dense operators, for testing
/// [`master_rhs`].
pub fn dense_generator(
    terms: &SpinBosonTerms,
    rate: f64,
    fock: usize,
    rho: &Array2<C64>,
) -> Array2<C64> {
    let ops = fock_operators(fock).expect("fock dimension ≥ 2");
    let d = terms.qubit_dim();
    let h = terms.to_operator(&ops).into_data();
    let embed = |m: &OperatorMatrix| OperatorMatrix::embed_motion(m.data(), d).into_data();
    let a = embed(&ops.a);
    let ad = embed(&ops.a_dagger);
    let mut out = (h.dot(rho) - rho.dot(&h)).mapv(|z| -I * z);
    let lind = |l: &Array2<C64>, ld: &Array2<C64>| {
        let ldl = ld.dot(l);
        l.dot(rho).dot(ld) - (ldl.dot(rho) + rho.dot(&ldl)).mapv(|z| 0.5 * z)
    };
    out = out + (lind(&a, &ad) + lind(&ad, &a)).mapv(|z| rate * z);
    out
}
