//! Drive Hamiltonians in the interaction picture (ħ = 1, angular frequencies).
//!
//! Phase convention: a drive of phase `φ` couples through
//! `σ_φ = e^{iφ}σ₊ + e^{−iφ}σ₋ = cos φ σₓ + sin φ σ_y`, so `φ_grad = 0` gives a
//! `+σₓ` force and a Walsh sign of −1 is a π shift of the DD phase.

mod params;
mod terms;
mod zeeman;

pub use params::{reduce_phase, DriveParams, SpectatorTransition};
pub use terms::{
    build_dd, build_off_resonant, build_sdf, dd_gradient_terms, dd_terms, embed_single,
    off_resonant_terms, residual_sdf_strength, sdf_quadratures, sdf_terms, sigma_phi,
    SidebandBalance, SpinBosonTerms,
};
pub use zeeman::{
    ac_stark_shift, ac_zeeman_imbalance, net_pi_shift, pi_shift_per_amp2, sigma_shift,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HamiltonianError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no real sideband ratio compensates the shift (required r² = {required_r2})")]
    InfeasibleCompensation { required_r2: f64 },
}
