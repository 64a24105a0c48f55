use ndarray::{s, Array2};

use crate::{c64, QuantumError, C64};

/// Dimension pair of a composite operator: register (qubit) factor and Fock factor.
///
/// Purely motional operators use `qubit = 1`; purely qubit operators `fock = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub qubit: usize,
    pub fock: usize,
}

impl Dims {
    pub fn new(qubit: usize, fock: usize) -> Self {
        Self { qubit, fock }
    }

    pub fn total(&self) -> usize {
        self.qubit * self.fock
    }
}

/// Dense square complex matrix tagged with its tensor-factor dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    data: Array2<C64>,
    dims: Dims,
}

impl OperatorMatrix {
    pub fn new(data: Array2<C64>, dims: Dims) -> Result<Self, QuantumError> {
        let n = dims.total();
        if data.nrows() != n || data.ncols() != n {
            return Err(QuantumError::ShapeMismatch {
                expected: n,
                got: data.nrows().max(data.ncols()),
            });
        }
        Ok(Self { data, dims })
    }

    pub fn zeros(dims: Dims) -> Self {
        let n = dims.total();
        Self {
            data: Array2::zeros((n, n)),
            dims,
        }
    }

    pub fn identity(dims: Dims) -> Self {
        Self {
            data: identity(dims.total()),
            dims,
        }
    }

    pub fn data(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut Array2<C64> {
        &mut self.data
    }

    pub fn into_data(self) -> Array2<C64> {
        self.data
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.total()
    }

    pub fn dagger(&self) -> Self {
        Self {
            data: dagger(&self.data),
            dims: self.dims,
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        crate::is_hermitian(&self.data, tol)
    }

    /// Matrix product. Panics if the dimensions differ.
    pub fn dot(&self, other: &Self) -> Self {
        assert_eq!(self.dims, other.dims, "operator dimension mismatch");
        Self {
            data: self.data.dot(&other.data),
            dims: self.dims,
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            data: self.data.mapv(|x| x * z),
            dims: self.dims,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dims, other.dims, "operator dimension mismatch");
        Self {
            data: &self.data + &other.data,
            dims: self.dims,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dims, other.dims, "operator dimension mismatch");
        Self {
            data: &self.data - &other.data,
            dims: self.dims,
        }
    }

    pub fn trace(&self) -> C64 {
        self.data.diag().sum()
    }

    /// `q ⊗ 1_fock` for a register operator `q`.
    pub fn embed_qubit(q: &Array2<C64>, fock_dim: usize) -> Self {
        Self {
            data: kron(q, &identity(fock_dim)),
            dims: Dims::new(q.nrows(), fock_dim),
        }
    }

    /// `1_register ⊗ m` for a motional operator `m`.
    pub fn embed_motion(m: &Array2<C64>, qubit_dim: usize) -> Self {
        Self {
            data: kron(&identity(qubit_dim), m),
            dims: Dims::new(qubit_dim, m.nrows()),
        }
    }

    /// `q ⊗ m`.
    pub fn tensor(q: &Array2<C64>, m: &Array2<C64>) -> Self {
        Self {
            data: kron(q, m),
            dims: Dims::new(q.nrows(), m.nrows()),
        }
    }
}

/// Annihilation, creation and number operators of a truncated oscillator.
#[derive(Debug, Clone)]
pub struct FockOperators {
    pub a: OperatorMatrix,
    pub a_dagger: OperatorMatrix,
    pub n: OperatorMatrix,
}

impl FockOperators {
    pub fn fock_dim(&self) -> usize {
        self.a.dims().fock
    }
}

/// Ladder operators on `fock_dim` levels. `n` is stored as the exact integer
/// diagonal `diag(0, 1, …, fock_dim − 1)`, which is `a†a` on the truncated space.
pub fn fock_operators(fock_dim: usize) -> Result<FockOperators, QuantumError> {
    if fock_dim < 2 {
        return Err(QuantumError::InvalidDimension(fock_dim));
    }
    let dims = Dims::new(1, fock_dim);
    let mut a = Array2::zeros((fock_dim, fock_dim));
    for n in 1..fock_dim {
        a[[n - 1, n]] = c64((n as f64).sqrt(), 0.0);
    }
    let a_dagger = dagger(&a);
    let n = Array2::from_shape_fn((fock_dim, fock_dim), |(i, j)| {
        c64(if i == j { i as f64 } else { 0.0 }, 0.0)
    });
    Ok(FockOperators {
        a: OperatorMatrix { data: a, dims },
        a_dagger: OperatorMatrix {
            data: a_dagger,
            dims,
        },
        n: OperatorMatrix { data: n, dims },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// Single-qubit Pauli matrix in the `(|0⟩, |1⟩)` basis.
pub fn pauli(p: Pauli) -> Array2<C64> {
    let o = c64(0.0, 0.0);
    let l = c64(1.0, 0.0);
    let i = c64(0.0, 1.0);
    let m = match p {
        Pauli::I => [[l, o], [o, l]],
        Pauli::X => [[o, l], [l, o]],
        Pauli::Y => [[o, -i], [i, o]],
        Pauli::Z => [[l, o], [o, -l]],
    };
    Array2::from_shape_fn((2, 2), |(r, c)| m[r][c])
}

/// `σ₊ = |1⟩⟨0|`.
pub fn sigma_plus() -> Array2<C64> {
    let mut m = Array2::zeros((2, 2));
    m[[1, 0]] = c64(1.0, 0.0);
    m
}

/// `σ₋ = |0⟩⟨1|`.
pub fn sigma_minus() -> Array2<C64> {
    dagger(&sigma_plus())
}

pub fn identity(n: usize) -> Array2<C64> {
    Array2::from_diag_elem(n, c64(1.0, 0.0))
}

pub fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            out.slice_mut(s![i * br..(i + 1) * br, j * bc..(j + 1) * bc])
                .assign(&b.mapv(|x| x * aij));
        }
    }
    out
}

pub fn commutator(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    a.dot(b) - b.dot(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::max_abs;

    #[test]
    fn smallest_ladder() {
        let ops = fock_operators(2).unwrap();
        let expected = Array2::from_shape_vec(
            (2, 2),
            vec![c64(0., 0.), c64(1., 0.), c64(0., 0.), c64(0., 0.)],
        )
        .unwrap();
        assert_eq!(ops.a.data(), &expected);
    }

    #[test]
    fn rejects_one_level() {
        assert_eq!(
            fock_operators(1).unwrap_err(),
            QuantumError::InvalidDimension(1)
        );
    }

    #[test]
    fn commutator_is_identity_but_last_entry() {
        let n = 7;
        let ops = fock_operators(n).unwrap();
        let c = commutator(ops.a.data(), ops.a_dagger.data());
        for i in 0..n {
            for j in 0..n {
                let want = match (i == j, i == n - 1) {
                    (true, false) => 1.0,
                    (true, true) => -((n - 1) as f64),
                    _ => 0.0,
                };
                assert!((c[[i, j]] - c64(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn number_operator_is_exact_diagonal() {
        let ops = fock_operators(9).unwrap();
        for k in 0..9 {
            assert_eq!(ops.n.data()[[k, k]], c64(k as f64, 0.0));
        }
        let ada = ops.a_dagger.data().dot(ops.a.data());
        assert!(max_abs(&(ada - ops.n.data())) < 1e-14);
        let mut v = ndarray::Array1::<C64>::zeros(9);
        v[3] = c64(1.0, 0.0);
        let nv = ops.n.data().dot(&v);
        assert!((v.mapv(|z| z.conj()).dot(&nv) - c64(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pauli_algebra() {
        let x = pauli(Pauli::X);
        let y = pauli(Pauli::Y);
        let z = pauli(Pauli::Z);
        let xy = x.dot(&y);
        assert!(max_abs(&(xy - z.mapv(|v| v * c64(0.0, 1.0)))) < 1e-15);
        let sp = sigma_plus();
        let from_paulis = (&x - &y.mapv(|v| v * c64(0.0, 1.0))).mapv(|v| v * 0.5);
        assert!(max_abs(&(sp - from_paulis)) < 1e-15);
    }

    #[test]
    fn kron_ordering_is_qubit_major() {
        let ops = fock_operators(3).unwrap();
        let op = OperatorMatrix::tensor(&sigma_plus(), ops.a.data());
        // ⟨1,0| σ₊⊗a |0,1⟩ = 1 sits at row 1*3+0, column 0*3+1.
        assert_eq!(op.data()[[3, 1]], c64(1.0, 0.0));
        assert_eq!(op.dims(), Dims::new(2, 3));
    }
}
