use ndarray::{Array1, Array2};

use crate::{c64, eigh, Dims, OperatorMatrix, QuantumError, C64};

/// Tail weight above which a truncated state is reported as untrustworthy.
const TAIL_WARNING: f64 = 1e-10;

/// Raised (alongside a still-usable result) when the truncated Fock space
/// cuts off a non-negligible part of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationWarning {
    /// Probability weight the infinite-dimensional state has on levels ≥ `fock_dim`.
    pub discarded_weight: f64,
    pub fock_dim: usize,
}

/// Phase-space amplitude of a coherent state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentAmplitude {
    pub alpha: C64,
}

impl CoherentAmplitude {
    pub fn new(alpha: C64) -> Self {
        Self { alpha }
    }

    pub fn real(alpha: f64) -> Self {
        Self {
            alpha: c64(alpha, 0.0),
        }
    }

    /// `|α|² ≤ fock_dim / 4`, the rule of thumb for a faithful truncation.
    pub fn within_truncation(&self, fock_dim: usize) -> bool {
        self.alpha.norm_sqr() <= fock_dim as f64 / 4.0
    }
}

/// Density matrix on a composite space. Construction checks trace and
/// hermiticity; positivity is checked on demand by [`DensityMatrix::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: OperatorMatrix,
}

impl DensityMatrix {
    pub const TRACE_TOL: f64 = 1e-10;
    pub const HERMITIAN_TOL: f64 = 1e-12;
    pub const POSITIVITY_TOL: f64 = 1e-8;

    pub fn new(op: OperatorMatrix) -> Result<Self, QuantumError> {
        let tr = op.trace();
        if (tr - c64(1.0, 0.0)).norm() > Self::TRACE_TOL {
            return Err(QuantumError::InvalidState(format!("trace {tr}")));
        }
        if !op.is_hermitian(Self::HERMITIAN_TOL) {
            return Err(QuantumError::InvalidState("not Hermitian".into()));
        }
        Ok(Self { op })
    }

    /// Wraps a matrix produced by a trusted integrator without re-checking it.
    pub fn from_unchecked(op: OperatorMatrix) -> Self {
        Self { op }
    }

    pub fn from_pure(psi: &Array1<C64>, dims: Dims) -> Result<Self, QuantumError> {
        let n = dims.total();
        if psi.len() != n {
            return Err(QuantumError::ShapeMismatch {
                expected: n,
                got: psi.len(),
            });
        }
        let data = Array2::from_shape_fn((n, n), |(i, j)| psi[i] * psi[j].conj());
        Self::new(OperatorMatrix::new(data, dims)?)
    }

    /// `ρ_q ⊗ ρ_m`.
    pub fn product(qubit: &Array2<C64>, motion: &DensityMatrix) -> Result<Self, QuantumError> {
        Self::new(OperatorMatrix::tensor(qubit, motion.data()))
    }

    /// `ρ_q ⊗ |0⟩⟨0|`.
    pub fn product_ground(qubit: &Array2<C64>, fock_dim: usize) -> Result<Self, QuantumError> {
        let mut m = Array2::zeros((fock_dim, fock_dim));
        m[[0, 0]] = c64(1.0, 0.0);
        Self::new(OperatorMatrix::tensor(qubit, &m))
    }

    pub fn data(&self) -> &Array2<C64> {
        self.op.data()
    }

    pub fn operator(&self) -> &OperatorMatrix {
        &self.op
    }

    pub fn into_operator(self) -> OperatorMatrix {
        self.op
    }

    pub fn dims(&self) -> Dims {
        self.op.dims()
    }

    pub fn trace(&self) -> C64 {
        self.op.trace()
    }

    /// `Tr(ρ A)`.
    pub fn expectation(&self, a: &OperatorMatrix) -> C64 {
        let r = self.op.data();
        let a = a.data();
        let n = r.nrows();
        let mut acc = c64(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += r[[i, k]] * a[[k, i]];
            }
        }
        acc
    }

    /// Mean phonon number `Tr(ρ · 1 ⊗ a†a)`.
    pub fn mean_phonons(&self) -> f64 {
        let Dims { qubit, fock } = self.dims();
        let r = self.op.data();
        let mut acc = 0.0;
        for q in 0..qubit {
            for n in 0..fock {
                acc += n as f64 * r[[q * fock + n, q * fock + n]].re;
            }
        }
        acc
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigh(self.op.data()).0[0]
    }

    /// Full invariant check including positivity (which needs an eigen-solve).
    pub fn validate(&self) -> Result<(), QuantumError> {
        let tr = self.trace();
        if (tr - c64(1.0, 0.0)).norm() > Self::TRACE_TOL {
            return Err(QuantumError::InvalidState(format!("trace {tr}")));
        }
        if !self.op.is_hermitian(Self::HERMITIAN_TOL) {
            return Err(QuantumError::InvalidState("not Hermitian".into()));
        }
        let lo = self.min_eigenvalue();
        if lo < -Self::POSITIVITY_TOL {
            return Err(QuantumError::InvalidState(format!(
                "negative eigenvalue {lo:e}"
            )));
        }
        Ok(())
    }
}

/// Fock-basis vector of the coherent state `|α⟩`, renormalized on the truncated space.
pub fn coherent_state(
    alpha: CoherentAmplitude,
    fock_dim: usize,
) -> Result<(Array1<C64>, Option<TruncationWarning>), QuantumError> {
    if fock_dim < 2 {
        return Err(QuantumError::InvalidDimension(fock_dim));
    }
    let a = alpha.alpha;
    let mut psi = Array1::zeros(fock_dim);
    psi[0] = c64((-0.5 * a.norm_sqr()).exp(), 0.0);
    for n in 1..fock_dim {
        psi[n] = psi[n - 1] * a / (n as f64).sqrt();
    }
    let kept: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    let discarded = (1.0 - kept).max(0.0);
    psi.mapv_inplace(|z| z / kept.sqrt());
    let warning = (!alpha.within_truncation(fock_dim) || discarded > TAIL_WARNING).then_some(
        TruncationWarning {
            discarded_weight: discarded,
            fock_dim,
        },
    );
    Ok((psi, warning))
}

/// Number state `|n⟩`.
pub fn number_state(n: usize, fock_dim: usize) -> Result<Array1<C64>, QuantumError> {
    if fock_dim < 2 {
        return Err(QuantumError::InvalidDimension(fock_dim));
    }
    if n >= fock_dim {
        return Err(QuantumError::ShapeMismatch {
            expected: fock_dim,
            got: n + 1,
        });
    }
    let mut v = Array1::zeros(fock_dim);
    v[n] = c64(1.0, 0.0);
    Ok(v)
}

/// Thermal (geometric) distribution with mean `n_bar`, renormalized on the truncated space.
pub fn thermal_state(
    n_bar: f64,
    fock_dim: usize,
) -> Result<(DensityMatrix, Option<TruncationWarning>), QuantumError> {
    if fock_dim < 2 {
        return Err(QuantumError::InvalidDimension(fock_dim));
    }
    if !(n_bar >= 0.0) {
        return Err(QuantumError::NegativeOccupation(n_bar));
    }
    let q = n_bar / (n_bar + 1.0);
    let weights: Vec<f64> = (0..fock_dim).map(|n| q.powi(n as i32)).collect();
    let norm: f64 = weights.iter().sum();
    let data = Array2::from_shape_fn((fock_dim, fock_dim), |(i, j)| {
        if i == j {
            c64(weights[i] / norm, 0.0)
        } else {
            c64(0.0, 0.0)
        }
    });
    let discarded = q.powi(fock_dim as i32);
    let warning = (discarded > TAIL_WARNING).then_some(TruncationWarning {
        discarded_weight: discarded,
        fock_dim,
    });
    let rho = DensityMatrix::new(OperatorMatrix::new(data, Dims::new(1, fock_dim))?)?;
    Ok((rho, warning))
}

/// Reduced register state `Tr_motion ρ`.
pub fn partial_trace_motion(rho: &DensityMatrix) -> Array2<C64> {
    let Dims { qubit, fock } = rho.dims();
    let r = rho.data();
    Array2::from_shape_fn((qubit, qubit), |(a, b)| {
        (0..fock).map(|n| r[[a * fock + n, b * fock + n]]).sum()
    })
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    qubit_purity(rho.data())
}

/// `Tr ρ²` for any Hermitian matrix.
pub fn qubit_purity(rho: &Array2<C64>) -> f64 {
    rho.iter().map(|z| z.norm_sqr()).sum()
}
