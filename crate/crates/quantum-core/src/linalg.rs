use nalgebra::{DMatrix, DVector};
use ndarray::Array2;

use crate::{c64, C64};

fn to_na(m: &Array2<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[[i, j]])
}

fn from_na(m: &DMatrix<C64>) -> Array2<C64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and the
/// matching eigenvectors as columns.
pub fn eigh(m: &Array2<C64>) -> (Vec<f64>, Array2<C64>) {
    let n = m.nrows();
    // Symmetrize so tiny anti-Hermitian noise does not leak into the solver.
    let h = DMatrix::from_fn(n, n, |i, j| (m[[i, j]] + m[[j, i]].conj()) * 0.5);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = Array2::from_shape_fn((n, n), |(i, j)| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// `exp(z·H)` for Hermitian `H` and complex scalar `z`, via eigen-decomposition.
pub fn expm_hermitian(h: &Array2<C64>, z: C64) -> Array2<C64> {
    let (vals, vecs) = eigh(h);
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|&v| (z * v).exp()));
    let v = to_na(&vecs);
    let out = &v * DMatrix::from_diagonal(&d) * v.adjoint();
    from_na(&out)
}

/// `exp(−iH)` for Hermitian `H`.
pub fn expm_minus_i(h: &Array2<C64>) -> Array2<C64> {
    expm_hermitian(h, c64(0.0, -1.0))
}

/// Trace distance `½‖A − B‖₁` between two Hermitian matrices.
pub fn trace_distance(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    let (vals, _) = eigh(&(a - b));
    0.5 * vals.iter().map(|v| v.abs()).sum::<f64>()
}

pub fn frobenius_norm(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest elementwise modulus.
pub fn max_abs(m: &Array2<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn is_hermitian(m: &Array2<C64>, tol: f64) -> bool {
    let n = m.nrows();
    if n != m.ncols() {
        return false;
    }
    (0..n).all(|i| (i..n).all(|j| (m[[i, j]] - m[[j, i]].conj()).norm() <= tol))
}

/// `max |U†U − 1|` elementwise.
pub fn unitary_defect(u: &Array2<C64>) -> f64 {
    let uu = crate::dagger(u).dot(u);
    max_abs(&(uu - crate::identity(u.nrows())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{pauli, Pauli};

    #[test]
    fn exp_of_pauli_x() {
        let theta = 0.37;
        let u = expm_hermitian(&pauli(Pauli::X), c64(0.0, -theta));
        let want = pauli(Pauli::I).mapv(|v| v * theta.cos())
            - pauli(Pauli::X).mapv(|v| v * c64(0.0, theta.sin()));
        assert!(max_abs(&(u.clone() - want)) < 1e-14);
        assert!(unitary_defect(&u) < 1e-14);
    }

    #[test]
    fn trace_distance_of_orthogonal_pure_states() {
        let mut a = Array2::zeros((2, 2));
        a[[0, 0]] = c64(1.0, 0.0);
        let mut b = Array2::zeros((2, 2));
        b[[1, 1]] = c64(1.0, 0.0);
        assert!((trace_distance(&a, &b) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigh_sorted_ascending() {
        let (vals, _) = eigh(&pauli(Pauli::Y));
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
    }
}
