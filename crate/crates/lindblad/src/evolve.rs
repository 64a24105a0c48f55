use std::cell::RefCell;

use hamiltonians::{DriveParams, SpinBosonTerms};
use ndarray::Array2;
use num_complex::Complex64 as C64;
use ode_solvers::{dop_shared::IntegrationError, DVector, Dopri5, OutputType, System};
use pulses::PulseSchedule;
use quantum_core::{thermal_state, Dims, DensityMatrix, OperatorMatrix, TruncationWarning};
use serde::Serialize;

use crate::{master_rhs, Drive, EvolveError, MotionalMode, SingleIonDrive};

/// Maximum change of the final `P₀` allowed when the Fock space is doubled.
pub const GUARD_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Target accuracy of the result. The step controller runs at a tenth of
    /// this, since local errors accumulate over many steps.
    pub rel_tol: f64,
    /// Absolute step tolerance; defaults to `rel_tol/1000`. The controller
    /// takes an RMS over all `2D²` components, most of which are near zero,
    /// so the absolute term needs headroom.
    pub abs_tol: Option<f64>,
    /// Number of uniform sampling intervals (segment boundaries are added).
    pub samples: usize,
    /// Compute the minimum eigenvalue of every sampled state.
    pub check_positivity: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: None,
            samples: 200,
            check_positivity: false,
        }
    }
}

impl EvolveOptions {
    pub fn with_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    /// Probability that the first qubit is in |0⟩.
    pub p0: f64,
    pub n_mean: f64,
    pub purity: f64,
    pub trace: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct IntegratorStats {
    pub intervals: usize,
    pub accepted_steps: u64,
    pub rejected_steps: u64,
    pub evaluations: u64,
    pub max_trace_deviation: f64,
    pub max_hermiticity_defect: f64,
    /// Smallest eigenvalue over sampled states, if positivity was checked.
    pub min_eigenvalue: Option<f64>,
    /// `|ΔP₀|` between `fock_dim` and `2·fock_dim`, if the guard ran.
    pub guard_deviation: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub rho_final: DensityMatrix,
    pub observables: Vec<Sample>,
    pub stats: IntegratorStats,
}

impl EvolutionResult {
    pub fn final_p0(&self) -> f64 {
        self.observables.last().map_or(f64::NAN, |s| s.p0)
    }
}

/// `ρ_q ⊗ ρ_thermal(n̄)` truncated at `fock_dim`.
pub fn initial_state(
    qubit: &Array2<C64>,
    mode: &MotionalMode,
    fock_dim: usize,
) -> Result<(DensityMatrix, Option<TruncationWarning>), EvolveError> {
    let (motion, warn) = thermal_state(mode.n_bar, fock_dim)?;
    Ok((DensityMatrix::product(qubit, &motion)?, warn))
}

struct Rhs<'a> {
    drive: &'a dyn Drive,
    rate: f64,
    fock: usize,
    t_ref: f64,
    work: &'a RefCell<(SpinBosonTerms, Vec<C64>)>,
}

impl System<f64, DVector<f64>> for Rhs<'_> {
    fn system(&self, t: f64, y: &DVector<f64>, dy: &mut DVector<f64>) {
        let mut work = self.work.borrow_mut();
        let (terms, scratch) = &mut *work;
        self.drive.terms(t, self.t_ref, terms);
        let rho: &[C64] = bytemuck::cast_slice(y.as_slice());
        let out: &mut [C64] = bytemuck::cast_slice_mut(dy.as_mut_slice());
        master_rhs(terms, self.rate, self.fock, rho, out, scratch);
    }
}

fn observe(rho: &[C64], d: usize, fock: usize, t: f64) -> Sample {
    let dim = d * fock;
    let mut p0 = 0.0;
    let mut n_mean = 0.0;
    let mut trace = 0.0;
    for i in 0..dim {
        let pop = rho[i * dim + i].re;
        trace += pop;
        n_mean += (i % fock) as f64 * pop;
        if i / fock < d / 2 {
            p0 += pop;
        }
    }
    let purity = rho.iter().map(|z| z.norm_sqr()).sum();
    Sample {
        t,
        p0,
        n_mean,
        purity,
        trace,
    }
}

fn hermiticity_defect(rho: &[C64], dim: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in i..dim {
            worst = worst.max((rho[i * dim + j] - rho[j * dim + i].conj()).norm());
        }
    }
    worst
}

fn knots(schedule: &PulseSchedule, samples: usize) -> Vec<(f64, bool)> {
    let total = schedule.total_duration;
    let mut v: Vec<(f64, bool)> = (0..=samples)
        .map(|k| (total * k as f64 / samples as f64, true))
        .collect();
    for seg in &schedule.segments {
        v.push((seg.t_start, true));
        v.push((seg.t_end, true));
    }
    v.extend(schedule.event_times().into_iter().map(|t| (t, false)));
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let eps = 1e-12 * total.max(1e-300);
    let mut out: Vec<(f64, bool)> = Vec::with_capacity(v.len());
    for (t, s) in v {
        match out.last_mut() {
            Some(last) if t - last.0 <= eps => last.1 |= s,
            _ => out.push((t, s)),
        }
    }
    out
}

fn integration_error(e: IntegrationError) -> EvolveError {
    let (t, msg) = match e {
        IntegrationError::MaxNumStepReached { x, n_step } => {
            (x, format!("step budget of {n_step} exhausted"))
        }
        IntegrationError::StepSizeUnderflow { x } => (x, "step size underflow".into()),
        IntegrationError::StiffnessDetected { x } => (x, "stiffness detected".into()),
    };
    EvolveError::Integrator { t, msg }
}

/// Evolve `rho0` under an arbitrary [`Drive`] plus the heating of `mode`.
pub fn evolve_with(
    drive: &dyn Drive,
    mode: &MotionalMode,
    rho0: &DensityMatrix,
    opts: &EvolveOptions,
) -> Result<EvolutionResult, EvolveError> {
    if !(1e-12..=1e-4).contains(&opts.rel_tol) {
        return Err(EvolveError::InvalidInput(format!(
            "rel_tol {} outside [1e-12, 1e-4]",
            opts.rel_tol
        )));
    }
    if opts.samples == 0 {
        return Err(EvolveError::InvalidInput("need at least one sample".into()));
    }
    mode.validate()?;
    rho0.validate()?;
    drive.schedule().validate()?;
    let dims = rho0.dims();
    let (d, fock) = (dims.qubit, dims.fock);
    if d != drive.qubit_dim() {
        return Err(EvolveError::InvalidInput(format!(
            "state has qubit dimension {d}, drive expects {}",
            drive.qubit_dim()
        )));
    }
    let dim = d * fock;
    let atol = opts.abs_tol.unwrap_or(1e-3 * opts.rel_tol);

    let flat: Vec<C64> = rho0.data().iter().copied().collect();
    let mut y = DVector::from_vec(bytemuck::cast_slice::<C64, f64>(&flat).to_vec());
    let work = RefCell::new((SpinBosonTerms::zero(d), vec![C64::new(0.0, 0.0); dim * dim]));

    let mut stats = IntegratorStats::default();
    let mut observables = Vec::with_capacity(opts.samples + 1);
    let mut min_eig = f64::INFINITY;
    let mut record = |y: &DVector<f64>, t: f64, stats: &mut IntegratorStats| {
        let rho: &[C64] = bytemuck::cast_slice(y.as_slice());
        let s = observe(rho, d, fock, t);
        stats.max_trace_deviation = stats.max_trace_deviation.max((s.trace - 1.0).abs());
        stats.max_hermiticity_defect = stats.max_hermiticity_defect.max(hermiticity_defect(rho, dim));
        if opts.check_positivity {
            let m = to_density(rho, dims).min_eigenvalue();
            min_eig = min_eig.min(m);
        }
        observables.push(s);
    };

    let knots = knots(drive.schedule(), opts.samples);
    record(&y, knots[0].0, &mut stats);
    let mut h_guess: f64 = 0.0;
    for w in knots.windows(2) {
        let (a, b) = (w[0].0, w[1].0);
        let len = b - a;
        let rhs = Rhs {
            drive,
            rate: mode.heating_rate,
            fock,
            t_ref: 0.5 * (a + b),
            work: &work,
        };
        let h0 = if h_guess > 0.0 { h_guess.min(len) } else { 0.0 };
        let mut solver = Dopri5::from_param(
            rhs,
            a,
            b,
            len,
            y.clone(),
            0.1 * opts.rel_tol,
            atol,
            0.9,
            0.04,
            0.2,
            10.0,
            len,
            h0,
            10_000_000,
            u32::MAX,
            OutputType::Sparse,
        );
        let st = solver.integrate().map_err(integration_error)?;
        stats.intervals += 1;
        stats.accepted_steps += st.accepted_steps as u64;
        stats.rejected_steps += st.rejected_steps as u64;
        stats.evaluations += st.num_eval as u64;
        h_guess = len / st.accepted_steps.max(1) as f64;
        let (xs, ys) = (solver.x_out(), solver.y_out());
        match (xs.last(), ys.last()) {
            (Some(&x), Some(last)) if (x - b).abs() <= 1e-9 * len => {
                y = last.clone();
            }
            _ => {
                return Err(EvolveError::Integrator {
                    t: b,
                    msg: "integrator produced no output at the interval end".into(),
                })
            }
        }
        if w[1].1 {
            record(&y, b, &mut stats);
        }
    }
    if opts.check_positivity {
        stats.min_eigenvalue = Some(min_eig);
    }
    let rho: &[C64] = bytemuck::cast_slice(y.as_slice());
    Ok(EvolutionResult {
        rho_final: to_density(rho, dims),
        observables,
        stats,
    })
}

fn to_density(rho: &[C64], dims: Dims) -> DensityMatrix {
    let dim = dims.total();
    let data = Array2::from_shape_vec((dim, dim), rho.to_vec()).expect("square state");
    DensityMatrix::from_unchecked(OperatorMatrix::new(data, dims).expect("consistent dims"))
}

/// Evolve a single ion through `schedule` with the default drive options.
pub fn evolve(
    schedule: &PulseSchedule,
    drive: &DriveParams,
    mode: &MotionalMode,
    rho0: &DensityMatrix,
    rel_tol: f64,
) -> Result<EvolutionResult, EvolveError> {
    let d = SingleIonDrive::new(schedule.clone(), *drive, mode.omega_m);
    evolve_with(&d, mode, rho0, &EvolveOptions::with_tol(rel_tol))
}

/// Run at `fock_dim` and `2·fock_dim` from `ρ_q ⊗ thermal(n̄)` and fail if the
/// final `P₀` moves by more than [`GUARD_TOLERANCE`].
pub fn evolve_guarded(
    drive: &dyn Drive,
    mode: &MotionalMode,
    qubit_rho0: &Array2<C64>,
    fock_dim: usize,
    opts: &EvolveOptions,
) -> Result<EvolutionResult, EvolveError> {
    let run = |n: usize| -> Result<EvolutionResult, EvolveError> {
        let (rho0, _) = initial_state(qubit_rho0, mode, n)?;
        evolve_with(drive, mode, &rho0, opts)
    };
    let (base, doubled) = rayon::join(|| run(fock_dim), || run(2 * fock_dim));
    let (mut base, doubled) = (base?, doubled?);
    let deviation = (base.final_p0() - doubled.final_p0()).abs();
    if !(deviation <= GUARD_TOLERANCE) {
        return Err(EvolveError::Convergence {
            observable: "P0".into(),
            deviation,
            fock_dim,
            doubled: 2 * fock_dim,
        });
    }
    base.stats.guard_deviation = Some(deviation);
    Ok(base)
}
