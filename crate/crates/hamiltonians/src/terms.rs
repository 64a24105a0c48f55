use std::f64::consts::FRAC_PI_2;

use ndarray::Array2;
use quantum_core::{dagger, identity, kron, Dims, FockOperators, OperatorMatrix, C64};

use crate::{DriveParams, HamiltonianError};

/// `σ_φ = e^{iφ}σ₊ + e^{−iφ}σ₋ = cos φ σₓ + sin φ σ_y`.
pub fn sigma_phi(phi: f64) -> Array2<C64> {
    let e = C64::from_polar(1.0, phi);
    let mut m = Array2::zeros((2, 2));
    m[[1, 0]] = e;
    m[[0, 1]] = e.conj();
    m
}

/// Single-qubit operator acting on qubit `which` of an `n_qubits` register
/// (qubit 0 is the most significant tensor factor).
pub fn embed_single(op: &Array2<C64>, which: usize, n_qubits: usize) -> Array2<C64> {
    assert!(which < n_qubits);
    let mut out = identity(1);
    for k in 0..n_qubits {
        out = if k == which {
            kron(&out, op)
        } else {
            kron(&out, &identity(2))
        };
    }
    out
}

/// A Hamiltonian linear in the ladder operators,
/// `H = bare ⊗ 1 + lower ⊗ a + lower† ⊗ a†`, with register-space coefficients.
///
/// Every drive in this crate has this shape; the master-equation right-hand
/// side exploits it instead of multiplying dense composite matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinBosonTerms {
    pub bare: Array2<C64>,
    pub lower: Array2<C64>,
}

impl SpinBosonTerms {
    pub fn zero(qubit_dim: usize) -> Self {
        Self {
            bare: Array2::zeros((qubit_dim, qubit_dim)),
            lower: Array2::zeros((qubit_dim, qubit_dim)),
        }
    }

    pub fn qubit_dim(&self) -> usize {
        self.bare.nrows()
    }

    pub fn add_assign(&mut self, other: &SpinBosonTerms) {
        self.bare += &other.bare;
        self.lower += &other.lower;
    }

    /// Embed single-qubit terms into qubit `which` of a register.
    pub fn embed(&self, which: usize, n_qubits: usize) -> Self {
        Self {
            bare: embed_single(&self.bare, which, n_qubits),
            lower: embed_single(&self.lower, which, n_qubits),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            bare: self.bare.mapv(|z| z * s),
            lower: self.lower.mapv(|z| z * s),
        }
    }

    /// Dense composite matrix on `register ⊗ Fock`.
    pub fn to_operator(&self, ops: &FockOperators) -> OperatorMatrix {
        let a = ops.a.data();
        let ad = ops.a_dagger.data();
        let data = kron(&self.bare, &identity(ops.fock_dim()))
            + kron(&self.lower, a)
            + kron(&dagger(&self.lower), ad);
        OperatorMatrix::new(data, Dims::new(self.qubit_dim(), ops.fock_dim()))
            .expect("consistent dimensions")
    }
}

/// Relative red/blue sideband amplitudes and extra phases (a balanced,
/// in-phase pair is `red = blue = 1`, both phases 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidebandBalance {
    pub red: f64,
    pub blue: f64,
    pub red_phase: f64,
    pub blue_phase: f64,
}

impl Default for SidebandBalance {
    fn default() -> Self {
        Self {
            red: 1.0,
            blue: 1.0,
            red_phase: 0.0,
            blue_phase: 0.0,
        }
    }
}

impl SidebandBalance {
    /// Blue/red amplitude ratio `r` with the red tone fixed at 1.
    pub fn from_ratio(r: f64) -> Self {
        Self {
            blue: r,
            ..Self::default()
        }
    }
}

/// State-dependent force from a detuned sideband pair with envelope scale `env`:
/// `(env·Ω_SB/2)[e^{iφ_grad}σ₊(c_r e^{iδt} a + c_b e^{−iδt} a†) + h.c.]`.
pub fn sdf_terms(p: &DriveParams, t: f64, env: f64, balance: SidebandBalance) -> SpinBosonTerms {
    let amp = 0.5 * p.omega_sb * env;
    let rot = C64::from_polar(1.0, p.delta * t);
    let mut lower = Array2::zeros((2, 2));
    // Coefficient of a: red term e^{iφ}σ₊ and conjugated blue term e^{−iφ}σ₋.
    lower[[1, 0]] = rot * C64::from_polar(amp * balance.red, p.phi_grad + balance.red_phase);
    lower[[0, 1]] = rot * C64::from_polar(amp * balance.blue, -(p.phi_grad + balance.blue_phase));
    SpinBosonTerms {
        bare: Array2::zeros((2, 2)),
        lower,
    }
}

/// Resonant DD carrier `(Ω/2)σ_φ` with explicit rate and phase.
pub fn dd_terms(omega_dd: f64, phi_dd: f64) -> SpinBosonTerms {
    SpinBosonTerms {
        bare: sigma_phi(phi_dd).mapv(|z| z * (0.5 * omega_dd)),
        lower: Array2::zeros((2, 2)),
    }
}

/// Off-resonant carrier `Ω cos((ω_m+δ)t) σ_{φ_field−φ_grad}` with `Ω = env·Ω_SB/η`.
pub fn off_resonant_terms(
    p: &DriveParams,
    omega_m: f64,
    t: f64,
    env: f64,
) -> Result<SpinBosonTerms, HamiltonianError> {
    let omega = p.carrier_rabi()? * env;
    let c = ((omega_m + p.delta) * t).cos();
    Ok(SpinBosonTerms {
        bare: sigma_phi(p.phi_field - p.phi_grad).mapv(|z| z * (omega * c)),
        lower: Array2::zeros((2, 2)),
    })
}

/// Position-gradient part of the DD drive,
/// `(g/2)(a e^{−iω_m t} + a† e^{iω_m t}) σ_{axis}` with `g = u_zpf ∂Ω_{DD,y}/∂u`.
///
/// `axis` is the phase of the out-of-phase DD component; with the sideband
/// phase as reference it is `π/2` (a `σ_y` coupling) times the Walsh sign.
pub fn dd_gradient_terms(g: f64, omega_m: f64, t: f64, axis: f64) -> SpinBosonTerms {
    let lower = sigma_phi(axis).mapv(|z| z * C64::from_polar(0.5 * g, -omega_m * t));
    SpinBosonTerms {
        bare: Array2::zeros((2, 2)),
        lower,
    }
}

/// Dense SDF Hamiltonian at time `t` (balanced sidebands, unit envelope).
pub fn build_sdf(p: &DriveParams, t: f64, ops: &FockOperators) -> OperatorMatrix {
    sdf_terms(p, t, 1.0, SidebandBalance::default()).to_operator(ops)
}

/// Dense DD Hamiltonian `(Ω_DD/2)(e^{iφ_DD}σ₊ + h.c.) ⊗ 1`.
pub fn build_dd(p: &DriveParams, ops: &FockOperators) -> OperatorMatrix {
    dd_terms(p.omega_dd, p.phi_dd).to_operator(ops)
}

/// Dense off-resonant carrier Hamiltonian for a mode at `omega_m`.
pub fn build_off_resonant(
    p: &DriveParams,
    omega_m: f64,
    t: f64,
    ops: &FockOperators,
) -> Result<OperatorMatrix, HamiltonianError> {
    Ok(off_resonant_terms(p, omega_m, t, 1.0)?.to_operator(ops))
}

/// SDF split in the frame where the DD axis is `σₓ`:
/// `(Ω/2)cos(φ_grad−φ_DD) σₓ ⊗ A(t)` commutes with the DD,
/// `(Ω/2)sin(φ_grad−φ_DD) σ_y ⊗ A(t)` does not, with `A(t) = e^{iδt}a + e^{−iδt}a†`.
///
/// Rotating both parts back by `e^{−iφ_DD σ_z/2}` reproduces [`build_sdf`].
pub fn sdf_quadratures(
    p: &DriveParams,
    t: f64,
    ops: &FockOperators,
) -> (OperatorMatrix, OperatorMatrix) {
    let d = p.phi_grad - p.phi_dd;
    let amp = 0.5 * p.omega_sb;
    let rot = C64::from_polar(1.0, p.delta * t);
    let part = |phi: f64, weight: f64| {
        SpinBosonTerms {
            bare: Array2::zeros((2, 2)),
            lower: sigma_phi(phi).mapv(|z| z * rot * (amp * weight)),
        }
        .to_operator(ops)
    };
    (part(0.0, d.cos()), part(FRAC_PI_2, d.sin()))
}

/// Cosine residual of the SDF left after ideal decoupling,
/// `Ω_res = Ω_SB cos(φ_grad − φ_DD)`.
pub fn residual_sdf_strength(omega_sb: f64, phi_grad: f64, phi_dd: f64) -> f64 {
    omega_sb * (phi_grad - phi_dd).cos()
}
