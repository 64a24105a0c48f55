use std::io::Write;

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use lindblad::MotionalMode;
use nalgebra::{DMatrix, DVector, Dyn, Owned};
use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{embedded_channel, BenchError, ChannelOptions, CliffordGroup, Embedded, QubitChannel};

/// Longest sequence the heating model is set up for.
pub const MAX_LENGTH: usize = 20;
pub const MIN_SEEDS: usize = 10;
/// Occupations, above the initial one, at which the pulse channel is computed.
pub const HEATING_GRID: [f64; 3] = [0.0, 0.5, 1.0];
/// Largest midpoint deviation, relative to the end-to-end change, for which
/// the channel is treated as affine in `n̄`.
pub const AFFINE_TOLERANCE: f64 = 1e-2;
/// Fixed asymptotes used to probe how much the fit depends on the offset.
pub const OFFSET_PROBES: [f64; 2] = [0.45, 0.55];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RbScenario {
    pub embedded: Embedded,
    pub mode: MotionalMode,
    /// Time from one Clifford to the next, including the embedded pulse (s).
    pub pair_duration: f64,
}

impl RbScenario {
    /// Reference motional mode: 5.77 MHz, cooled to the ground state, heating at 370 quanta/s.
    pub fn reference_mode() -> MotionalMode {
        MotionalMode::cold(2.0 * std::f64::consts::PI * 5.77e6, 10e-9).with_heating(370.0)
    }

    /// Clifford/pulse pairs repeating every 1.78 ms.
    pub fn reference(embedded: Embedded) -> Self {
        Self {
            embedded,
            mode: Self::reference_mode(),
            pair_duration: 1.78e-3,
        }
    }

    /// Occupation at the start of pair `k` (0-based).
    pub fn n_bar_at(&self, k: usize) -> f64 {
        self.mode.n_bar + self.mode.heating_rate * self.pair_duration * k as f64
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let d = self.embedded.duration()?;
        if !(self.pair_duration >= d) {
            return Err(BenchError::InvalidInput(format!(
                "pair duration {:e} s is shorter than the embedded operation ({d:e} s)",
                self.pair_duration
            )));
        }
        self.mode.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbConfig {
    pub lengths: Vec<usize>,
    pub n_seeds: usize,
    pub base_seed: u64,
}

impl Default for RbConfig {
    fn default() -> Self {
        Self {
            lengths: vec![1, 5, 10, 15, 20],
            n_seeds: MIN_SEEDS,
            base_seed: 0,
        }
    }
}

impl RbConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::InvalidInput(m));
        if self.lengths.is_empty() {
            return bad("no sequence lengths".into());
        }
        if let Some(&l) = self.lengths.iter().find(|&&l| l == 0 || l > MAX_LENGTH) {
            return bad(format!("sequence length {l} outside 1..={MAX_LENGTH}"));
        }
        if self.n_seeds < MIN_SEEDS {
            return bad(format!("{} seeds, need at least {MIN_SEEDS}", self.n_seeds));
        }
        Ok(())
    }
}

/// One random sequence: Cliffords applied left to right, each followed by the
/// embedded operation, then the recovery Clifford.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RbSequence {
    pub cliffords: Vec<usize>,
    pub inverse: usize,
    pub seed: u64,
}

/// Draw one sequence of each length from the stream seeded by `seed`.
pub fn draw_sequences(group: &CliffordGroup, lengths: &[usize], seed: u64) -> Vec<RbSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    lengths
        .iter()
        .map(|&l| {
            let cliffords: Vec<usize> = (0..l).map(|_| rng.gen_range(0..group.len())).collect();
            RbSequence {
                inverse: group.recovery(&cliffords),
                cliffords,
                seed,
            }
        })
        .collect()
}

/// How the pulse channel follows the growing occupation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeatingModel {
    /// The pulse does not couple to the motion, or there is no heating.
    Static,
    /// Linear in `n̄` through the grid, extrapolated beyond it.
    Affine,
    /// Too far from linear to extrapolate; the last grid channel is reused.
    Clamped,
}

/// Pulse channels for each pair of a sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairChannels {
    pub model: HeatingModel,
    /// `|E(mid) − (E(lo) + E(hi))/2| / |E(hi) − E(lo)|` on the grid.
    pub affine_defect: Option<f64>,
    pub channels: Vec<QubitChannel>,
    pub n_bars: Vec<f64>,
    pub min_choi_eigenvalue: f64,
    pub max_trace_defect: f64,
    pub guard_deviation: Option<f64>,
}

/// Channels for pairs `0..pairs`, with occupation growing as in `scenario`.
pub fn pair_channels(
    scenario: &RbScenario,
    pairs: usize,
    opts: &ChannelOptions,
) -> Result<PairChannels, BenchError> {
    scenario.validate()?;
    let n_bars: Vec<f64> = (0..pairs).map(|k| scenario.n_bar_at(k)).collect();
    let heats = scenario.mode.heating_rate > 0.0 && pairs > 1;
    let (model, defect, channels, guard) = if !scenario.embedded.couples_to_motion() || !heats {
        let r = embedded_channel(&scenario.embedded, &scenario.mode, opts)?;
        (HeatingModel::Static, None, vec![r.channel; pairs], r.guard_deviation)
    } else {
        let grid = HEATING_GRID
            .iter()
            .enumerate()
            .map(|(i, &dn)| {
                let mode = scenario.mode.with_n_bar(scenario.mode.n_bar + dn);
                let o = ChannelOptions {
                    guard: opts.guard && i + 1 == HEATING_GRID.len(),
                    ..*opts
                };
                embedded_channel(&scenario.embedded, &mode, &o)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let (lo, mid, hi) = (&grid[0].channel, &grid[1].channel, &grid[2].channel);
        let span = hi.distance(lo);
        let w_mid = HEATING_GRID[1] / HEATING_GRID[2];
        let defect = if span > 0.0 {
            mid.distance(&QubitChannel::lerp(lo, hi, w_mid)) / span
        } else {
            0.0
        };
        let affine = defect <= AFFINE_TOLERANCE;
        let channels = n_bars
            .iter()
            .map(|&n| {
                let dn = n - scenario.mode.n_bar;
                if affine {
                    QubitChannel::lerp(lo, hi, dn / HEATING_GRID[2])
                } else if dn >= HEATING_GRID[2] {
                    hi.clone()
                } else {
                    QubitChannel::lerp(lo, hi, dn / HEATING_GRID[2])
                }
            })
            .collect();
        let model = if affine {
            HeatingModel::Affine
        } else {
            HeatingModel::Clamped
        };
        (model, Some(defect), channels, grid[2].guard_deviation)
    };
    let min_choi = channels
        .iter()
        .map(QubitChannel::min_choi_eigenvalue)
        .fold(f64::INFINITY, f64::min);
    let max_tp = channels
        .iter()
        .map(QubitChannel::trace_defect)
        .fold(0.0, f64::max);
    Ok(PairChannels {
        model,
        affine_defect: defect,
        channels,
        n_bars,
        min_choi_eigenvalue: min_choi,
        max_trace_defect: max_tp,
        guard_deviation: guard,
    })
}

/// `1 − P(|0⟩)` after running `seq` from `|0⟩` with `channels[k]` after Clifford `k`.
pub fn sequence_error(group: &CliffordGroup, seq: &RbSequence, channels: &[QubitChannel]) -> f64 {
    let mut rho = Array2::<C64>::zeros((2, 2));
    rho[[0, 0]] = C64::new(1.0, 0.0);
    let conj = |u: &Array2<C64>, r: &Array2<C64>| u.dot(r).dot(&u.t().mapv(|z| z.conj()));
    for (k, &c) in seq.cliffords.iter().enumerate() {
        rho = channels[k].apply(&conj(group.unitary(c), &rho));
    }
    rho = conj(group.unitary(seq.inverse), &rho);
    (1.0 - rho[[0, 0]].re).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbPoint {
    pub length: usize,
    pub mean_error: f64,
    /// Standard error of the mean over seeds (68% interval half-width).
    pub ci: f64,
    pub per_seed: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbFit {
    /// Error per Clifford/pulse pair.
    pub epsilon: f64,
    /// Jackknife standard error over seeds.
    pub epsilon_ci: f64,
    /// SPAM-like intercept `e₀`.
    pub e0: f64,
    /// Data minus model, in survival probability, per length.
    pub residuals: Vec<f64>,
    /// `(fixed asymptote, ε)` for each offset probe.
    pub offset_sensitivity: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbResult {
    pub scenario: RbScenario,
    pub config: RbConfig,
    pub points: Vec<RbPoint>,
    pub fit: Option<RbFit>,
    pub fit_converged: bool,
    pub heating_model: HeatingModel,
    pub affine_defect: Option<f64>,
    /// Average infidelity of the first and last pulse channel.
    pub first_pair_infidelity: f64,
    pub last_pair_infidelity: f64,
    pub min_choi_eigenvalue: f64,
    pub max_trace_defect: f64,
    pub guard_deviation: Option<f64>,
}

/// `p(L) = A + (½ − e₀)·r^L` with `A` fixed, fitted in `(e₀, r)`.
struct DecayFit<'a> {
    lengths: &'a [f64],
    survival: &'a [f64],
    asymptote: f64,
    p: DVector<f64>,
}

impl LeastSquaresProblem<f64, Dyn, Dyn> for DecayFit<'_> {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, Dyn>;
    type ParameterStorage = Owned<f64, Dyn>;

    fn set_params(&mut self, p: &DVector<f64>) {
        self.p.copy_from(p);
    }

    fn params(&self) -> DVector<f64> {
        self.p.clone()
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        let (e0, r) = (self.p[0], self.p[1]);
        Some(DVector::from_iterator(
            self.lengths.len(),
            self.lengths
                .iter()
                .zip(self.survival)
                .map(|(&l, &s)| self.asymptote + (0.5 - e0) * r.powf(l) - s),
        ))
    }

    fn jacobian(&self) -> Option<DMatrix<f64>> {
        let (e0, r) = (self.p[0], self.p[1]);
        let mut j = DMatrix::zeros(self.lengths.len(), 2);
        for (i, &l) in self.lengths.iter().enumerate() {
            j[(i, 0)] = -r.powf(l);
            j[(i, 1)] = if l == 0.0 { 0.0 } else { (0.5 - e0) * l * r.powf(l - 1.0) };
        }
        Some(j)
    }
}

/// Fit `½ + (½ − e₀)(1 − 2ε)^L`-style decay to survival probabilities.
/// Returns `(ε, e₀, residuals)` or `None` if the fit fails.
pub fn fit_decay(lengths: &[usize], survival: &[f64], asymptote: f64) -> Option<(f64, f64, Vec<f64>)> {
    if lengths.len() < 2 || lengths.len() != survival.len() {
        return None;
    }
    let ls: Vec<f64> = lengths.iter().map(|&l| l as f64).collect();
    let (l_max, s_max) = ls
        .iter()
        .zip(survival)
        .max_by(|a, b| a.0.total_cmp(b.0))
        .map(|(&l, &s)| (l, s))?;
    let amp = 0.5;
    let r0 = ((s_max - asymptote) / amp).clamp(1e-6, 1.0).powf(1.0 / l_max);
    let problem = DecayFit {
        lengths: &ls,
        survival,
        asymptote,
        p: DVector::from_vec(vec![0.0, r0]),
    };
    let (fitted, report) = LevenbergMarquardt::new().minimize(problem);
    let ok = report.termination.was_successful() || report.objective_function < 1e-30;
    let (e0, r) = (fitted.p[0], fitted.p[1]);
    if !ok || !e0.is_finite() || !r.is_finite() {
        return None;
    }
    let res = fitted.residuals()?.iter().copied().collect();
    Some(((1.0 - r) / 2.0, e0, res))
}

/// Run every seed at every length and fit the decay.
pub fn run_rb(
    scenario: &RbScenario,
    config: &RbConfig,
    opts: &ChannelOptions,
) -> Result<RbResult, BenchError> {
    config.validate()?;
    let pairs = *config.lengths.iter().max().expect("validated");
    let chans = pair_channels(scenario, pairs, opts)?;
    run_rb_with_channels(scenario, config, &chans)
}

/// As [`run_rb`], reusing precomputed pair channels.
pub fn run_rb_with_channels(
    scenario: &RbScenario,
    config: &RbConfig,
    chans: &PairChannels,
) -> Result<RbResult, BenchError> {
    config.validate()?;
    let pairs = *config.lengths.iter().max().expect("validated");
    if chans.channels.len() < pairs {
        return Err(BenchError::InvalidInput(format!(
            "{} pair channels for sequences of length {pairs}",
            chans.channels.len()
        )));
    }
    let group = CliffordGroup::new();
    // errors[s][l]
    let errors: Vec<Vec<f64>> = (0..config.n_seeds as u64)
        .into_par_iter()
        .map(|i| {
            draw_sequences(&group, &config.lengths, config.base_seed + i)
                .iter()
                .map(|seq| sequence_error(&group, seq, &chans.channels))
                .collect()
        })
        .collect();
    let n = config.n_seeds as f64;
    let points: Vec<RbPoint> = config
        .lengths
        .iter()
        .enumerate()
        .map(|(li, &length)| {
            let per_seed: Vec<f64> = errors.iter().map(|e| e[li]).collect();
            let mean = per_seed.iter().sum::<f64>() / n;
            let var = per_seed.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0);
            RbPoint {
                length,
                mean_error: mean,
                ci: (var / n).sqrt(),
                per_seed,
            }
        })
        .collect();

    let survival_of = |rows: &mut dyn Iterator<Item = &Vec<f64>>| -> Vec<f64> {
        let rows: Vec<&Vec<f64>> = rows.collect();
        (0..config.lengths.len())
            .map(|li| 1.0 - rows.iter().map(|e| e[li]).sum::<f64>() / rows.len() as f64)
            .collect()
    };
    let survival = survival_of(&mut errors.iter());
    let fit = fit_decay(&config.lengths, &survival, 0.5).map(|(epsilon, e0, residuals)| {
        let jack: Vec<f64> = (0..errors.len())
            .filter_map(|skip| {
                let s = survival_of(&mut errors.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, e)| e));
                fit_decay(&config.lengths, &s, 0.5).map(|f| f.0)
            })
            .collect();
        let m = jack.len() as f64;
        let jm = jack.iter().sum::<f64>() / m;
        let epsilon_ci = ((m - 1.0) / m * jack.iter().map(|e| (e - jm).powi(2)).sum::<f64>()).sqrt();
        let offset_sensitivity = OFFSET_PROBES
            .iter()
            .map(|&a| (a, fit_decay(&config.lengths, &survival, a).map_or(f64::NAN, |f| f.0)))
            .collect();
        RbFit {
            epsilon,
            epsilon_ci,
            e0,
            residuals,
            offset_sensitivity,
        }
    });
    Ok(RbResult {
        scenario: *scenario,
        config: config.clone(),
        fit_converged: fit.is_some(),
        fit,
        points,
        heating_model: chans.model,
        affine_defect: chans.affine_defect,
        first_pair_infidelity: chans.channels[0].infidelity(),
        last_pair_infidelity: chans.channels[pairs - 1].infidelity(),
        min_choi_eigenvalue: chans.min_choi_eigenvalue,
        max_trace_defect: chans.max_trace_defect,
        guard_deviation: chans.guard_deviation,
    })
}

/// Per-length curve: `length,mean_error,ci,survival`.
pub fn write_rb_csv<W: Write>(result: &RbResult, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["length", "mean_error", "ci", "survival"])?;
    for p in &result.points {
        w.write_record(&[
            p.length.to_string(),
            format!("{:e}", p.mean_error),
            format!("{:e}", p.ci),
            format!("{:e}", 1.0 - p.mean_error),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_synthetic_decay() {
        let lengths = [1, 5, 10, 15, 20];
        for &(eps, e0) in &[(1e-4, 0.0), (3e-3, 0.01), (0.2, 0.0)] {
            let s: Vec<f64> = lengths
                .iter()
                .map(|&l| 0.5 + (0.5 - e0) * (1.0f64 - 2.0 * eps).powi(l as i32))
                .collect();
            let (got, g0, res) = fit_decay(&lengths, &s, 0.5).unwrap();
            assert!((got - eps).abs() < 1e-9 * eps.max(1e-3), "{got} vs {eps}");
            assert!((g0 - e0).abs() < 1e-8);
            assert!(res.iter().all(|r| r.abs() < 1e-10));
        }
    }

    #[test]
    fn perfect_data_fits_to_zero() {
        let (eps, e0, _) = fit_decay(&[1, 5, 10], &[1.0, 1.0, 1.0], 0.5).unwrap();
        assert!(eps.abs() <= 1e-12 && e0.abs() <= 1e-12);
    }

    #[test]
    fn recovery_inverts_every_sequence() {
        let g = CliffordGroup::new();
        let ident = vec![QubitChannel::identity(); MAX_LENGTH];
        for seed in 0..20 {
            for seq in draw_sequences(&g, &[1, 7, 20], seed) {
                assert!(sequence_error(&g, &seq, &ident) < 1e-14);
            }
        }
    }

    #[test]
    fn sequences_are_seed_determined() {
        let g = CliffordGroup::new();
        assert_eq!(draw_sequences(&g, &[5, 9], 3), draw_sequences(&g, &[5, 9], 3));
        assert_ne!(draw_sequences(&g, &[5, 9], 3), draw_sequences(&g, &[5, 9], 4));
    }

    #[test]
    fn config_limits() {
        assert!(RbConfig::default().validate().is_ok());
        let long = RbConfig {
            lengths: vec![21],
            ..RbConfig::default()
        };
        assert!(long.validate().is_err());
        let few = RbConfig {
            n_seeds: 9,
            ..RbConfig::default()
        };
        assert!(few.validate().is_err());
    }
}
