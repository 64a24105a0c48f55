//! Scenario configs. Frequencies are in Hz and converted to rad/s here;
//! lengths and durations are SI.

use std::f64::consts::PI;

use benchmarking::{Embedded, MsPulse, RbConfig, RbScenario};
use chain::{ChainSpec, GateSettings, BOHR_RABI_PER_TESLA};
use fieldmodel::{TrapGeometry, Wire};
use lindblad::MotionalMode;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::CliError;

fn hz(f: f64) -> f64 {
    2.0 * PI * f
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("`{name}` must be positive, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<(), CliError> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("`{name}` must be non-negative, got {v}")))
    }
}

fn grid(name: &str, lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if n < 2 || !(hi > lo) {
        return Err(CliError::Config(format!(
            "`{name}` needs n_points ≥ 2 and max > min"
        )));
    }
    Ok((0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModeConfig {
    pub frequency_hz: f64,
    pub n_bar: f64,
    /// Quanta per second.
    pub heating_rate: f64,
    /// Metres.
    pub u_zpf: f64,
    pub tilt_theta: f64,
}

impl Default for ModeConfig {
    fn default() -> Self {
        Self {
            frequency_hz: 5.77e6,
            n_bar: 0.0,
            heating_rate: 370.0,
            u_zpf: 4.513e-9,
            tilt_theta: 0.0,
        }
    }
}

impl ModeConfig {
    pub fn mode(&self) -> Result<MotionalMode, CliError> {
        positive("mode.frequency_hz", self.frequency_hz)?;
        non_negative("mode.n_bar", self.n_bar)?;
        non_negative("mode.heating_rate", self.heating_rate)?;
        positive("mode.u_zpf", self.u_zpf)?;
        Ok(MotionalMode {
            omega_m: hz(self.frequency_hz),
            n_bar: self.n_bar,
            heating_rate: self.heating_rate,
            u_zpf: self.u_zpf,
            tilt_theta: self.tilt_theta,
        })
    }

    fn cold() -> Self {
        Self {
            heating_rate: 0.0,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecayConfig {
    pub omega_sb_hz: f64,
    pub delta_hz: f64,
    pub duration: f64,
    pub mode: ModeConfig,
    /// One decay curve per heating rate (quanta/s).
    pub heating_rates: Vec<f64>,
    pub samples: usize,
    pub fock_dim: usize,
    pub rel_tol: f64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            omega_sb_hz: 380.0,
            delta_hz: 0.0,
            duration: 2.2e-3,
            mode: ModeConfig::default(),
            heating_rates: vec![0.0, 370.0],
            samples: 200,
            fock_dim: 30,
            rel_tol: 1e-8,
        }
    }
}

impl DecayConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        positive("omega_sb_hz", self.omega_sb_hz)?;
        non_negative("delta_hz", self.delta_hz)?;
        positive("duration", self.duration)?;
        if self.heating_rates.is_empty() || self.samples == 0 {
            return Err(CliError::Config("`heating_rates` and `samples` must be non-empty".into()));
        }
        for &r in &self.heating_rates {
            non_negative("heating_rates[]", r)?;
        }
        self.mode.mode().map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DdPhaseConfig {
    pub omega_sb_hz: f64,
    /// `Ω_DD/Ω_SB`.
    pub dd_ratio: f64,
    /// `P₀` the pulse reaches without DD; sets its duration.
    pub p0_target: f64,
    pub walsh_order: u32,
    pub dd_ramp: f64,
    pub sb_ramp: f64,
    pub phi_min: f64,
    pub phi_max: f64,
    pub n_points: usize,
    pub mode: ModeConfig,
    pub fock_dim: usize,
    pub rel_tol: f64,
}

impl Default for DdPhaseConfig {
    fn default() -> Self {
        Self {
            omega_sb_hz: 380.0,
            dd_ratio: 60.0,
            p0_target: 0.6,
            walsh_order: 3,
            dd_ramp: 120e-9,
            sb_ramp: 2.4e-6,
            phi_min: 0.0,
            phi_max: PI,
            n_points: 25,
            mode: ModeConfig::cold(),
            fock_dim: 30,
            rel_tol: 1e-8,
        }
    }
}

impl DdPhaseConfig {
    pub fn phases(&self) -> Result<Vec<f64>, CliError> {
        grid("phi", self.phi_min, self.phi_max, self.n_points)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        positive("omega_sb_hz", self.omega_sb_hz)?;
        non_negative("dd_ratio", self.dd_ratio)?;
        if !(self.p0_target > 0.5 && self.p0_target < 1.0) {
            return Err(CliError::Config("`p0_target` must lie in (0.5, 1)".into()));
        }
        self.phases()?;
        self.mode.mode().map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuppressionConfig {
    pub omega_sb_hz: f64,
    pub p0_target: f64,
    pub walsh_order: u32,
    pub dd_ramp: f64,
    pub sb_ramp: f64,
    pub phi_dd: f64,
    pub ratios: Vec<f64>,
    /// Extra points on each side of every ratio.
    pub neighbours: usize,
    pub mode: ModeConfig,
    pub fock_dim: usize,
    pub rel_tol: f64,
}

impl Default for SuppressionConfig {
    fn default() -> Self {
        Self {
            omega_sb_hz: 380.0,
            p0_target: 0.6,
            walsh_order: 3,
            dd_ramp: 120e-9,
            sb_ramp: 2.4e-6,
            phi_dd: 0.5 * PI,
            ratios: (1..=10).map(|k| 10.0 * k as f64).collect(),
            neighbours: 14,
            mode: ModeConfig::cold(),
            fock_dim: 30,
            rel_tol: 1e-8,
        }
    }
}

impl SuppressionConfig {
    pub fn scenario(&self) -> Result<lindblad::SuppressionScenario, CliError> {
        positive("omega_sb_hz", self.omega_sb_hz)?;
        if self.ratios.is_empty() {
            return Err(CliError::Config("`ratios` must be non-empty".into()));
        }
        if let Some(r) = self.ratios.iter().find(|r| !(**r >= 1.0)) {
            return Err(CliError::Config(format!("`ratios` entry {r} below 1")));
        }
        let mode = self.mode.mode()?;
        let mut s = lindblad::SuppressionScenario::reference(mode.omega_m, mode.u_zpf);
        s.omega_sb = hz(self.omega_sb_hz);
        s.duration = lindblad::time_for_p0(s.omega_sb, self.p0_target);
        s.walsh_order = self.walsh_order;
        s.dd_ramp = self.dd_ramp;
        s.sb_ramp = self.sb_ramp;
        s.phi_dd = self.phi_dd;
        s.mode = mode;
        s.neighbours = self.neighbours;
        s.fock_dim = self.fock_dim;
        s.rel_tol = self.rel_tol;
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ZoneConfig {
    /// Wires sit at `±half_spacing`.
    pub half_spacing: f64,
    pub ion_height: f64,
    /// Second-wire current `−amplitude·e^{i·phase}` relative to the first.
    pub amplitude: f64,
    pub phase: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub u_zpf: f64,
    pub tilt_theta: f64,
    /// `P₀` the calibrated pulse reaches without DD.
    pub p0_undriven: f64,
    /// DD phase relative to the local field phase; `null` aligns DD and
    /// gradient at the field minimum.
    pub dd_phase_offset: Option<f64>,
    pub threshold: f64,
}

impl Default for ZoneConfig {
    fn default() -> Self {
        Self {
            half_spacing: 50e-6,
            ion_height: 40e-6,
            amplitude: 0.856,
            phase: 0.0480,
            x_min: -20e-6,
            x_max: 20e-6,
            n_points: 401,
            u_zpf: 4.513e-9,
            tilt_theta: 0.0,
            p0_undriven: 0.51,
            dd_phase_offset: None,
            threshold: 0.75,
        }
    }
}

impl ZoneConfig {
    pub fn geometry(&self) -> Result<TrapGeometry, CliError> {
        positive("half_spacing", self.half_spacing)?;
        positive("ion_height", self.ion_height)?;
        positive("amplitude", self.amplitude)?;
        positive("u_zpf", self.u_zpf)?;
        Ok(TrapGeometry::two_wire(
            self.half_spacing,
            self.ion_height,
            self.amplitude,
            self.phase,
        )?)
    }

    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        grid("x", self.x_min, self.x_max, self.n_points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldMapConfig {
    pub geometry: TrapGeometry,
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub u_zpf: f64,
    pub tilt_theta: f64,
}

impl Default for FieldMapConfig {
    fn default() -> Self {
        let z = ZoneConfig::default();
        Self {
            geometry: TrapGeometry {
                wires: vec![
                    Wire::new(-z.half_spacing, C64::new(1.0, 0.0)),
                    Wire::new(z.half_spacing, -C64::from_polar(z.amplitude, z.phase)),
                ],
                ion_height: z.ion_height,
            },
            x_min: -40e-6,
            x_max: 40e-6,
            n_points: 161,
            u_zpf: z.u_zpf,
            tilt_theta: 0.0,
        }
    }
}

impl FieldMapConfig {
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        self.geometry.validate()?;
        positive("u_zpf", self.u_zpf)?;
        grid("x", self.x_min, self.x_max, self.n_points)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainConfig {
    pub n_ions: usize,
    pub spacing: f64,
    pub ion_height: f64,
    pub electrodes: Vec<f64>,
    pub central_electrode: usize,
    /// Phase error of the central current (radians).
    pub epsilon: f64,
    pub mode_frequency_hz: f64,
    pub u_zpf: f64,
    /// Quadrature crosstalk floor that sets the smallest `Ω_DD/Ω_SB` at
    /// non-addressed ions via `8 (Ω_DD/Ω_SB)⁻²`.
    pub quadrature_floor: f64,
    pub gate_duration: f64,
    pub loops: u32,
    pub walsh_order: u32,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            n_ions: 17,
            spacing: 5e-6,
            ion_height: 40e-6,
            electrodes: vec![-40e-6, 0.0, 40e-6],
            central_electrode: 1,
            epsilon: 3e-5,
            mode_frequency_hz: 200e3,
            u_zpf: 6e-9,
            quadrature_floor: 7e-5,
            gate_duration: 250e-6,
            loops: 1,
            walsh_order: 15,
        }
    }
}

impl ChainConfig {
    pub fn spec(&self) -> Result<ChainSpec, CliError> {
        positive("quadrature_floor", self.quadrature_floor)?;
        positive("mode_frequency_hz", self.mode_frequency_hz)?;
        let spec = ChainSpec {
            n_ions: self.n_ions,
            spacing: self.spacing,
            ion_height: self.ion_height,
            electrodes: self.electrodes.clone(),
            central_electrode: self.central_electrode,
            epsilon: self.epsilon,
            mode: MotionalMode::cold(hz(self.mode_frequency_hz), self.u_zpf),
            min_dd_ratio: (8.0 / self.quadrature_floor).sqrt(),
            rabi_per_tesla: BOHR_RABI_PER_TESLA,
            gate: GateSettings {
                duration: self.gate_duration,
                loops: self.loops,
                walsh_order: self.walsh_order,
            },
        };
        spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateConfig {
    pub chain: ChainConfig,
    pub pair: [usize; 2],
    /// Common chain shifts (metres).
    pub displacements: Vec<f64>,
    pub n_bars: Vec<f64>,
    pub dd: bool,
    pub dd_gradient: bool,
    pub fock_dim: usize,
    pub rel_tol: f64,
}

impl Default for GateConfig {
    fn default() -> Self {
        Self {
            chain: ChainConfig::default(),
            pair: [4, 7],
            displacements: vec![-5e-9, 0.0, 5e-9],
            n_bars: vec![0.0, 0.1, 0.3],
            dd: true,
            dd_gradient: true,
            fock_dim: 20,
            rel_tol: 1e-9,
        }
    }
}

impl GateConfig {
    pub fn validate(&self) -> Result<ChainSpec, CliError> {
        let spec = self.chain.spec()?;
        let [i, j] = self.pair;
        if i == j || i >= spec.n_ions || j >= spec.n_ions {
            return Err(CliError::Config(format!(
                "`pair` [{i}, {j}] must name two different ions below {}",
                spec.n_ions
            )));
        }
        if self.displacements.is_empty() || self.n_bars.is_empty() {
            return Err(CliError::Config("`displacements` and `n_bars` must be non-empty".into()));
        }
        for &n in &self.n_bars {
            non_negative("n_bars[]", n)?;
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddedKind {
    /// Sidebands plus DD.
    Ms,
    /// DD only, same timing.
    DdOnly,
    /// A wait as long as the pulse.
    Delay,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmbeddedConfig {
    pub kind: EmbeddedKind,
    pub omega_sb_hz: f64,
    pub delta_hz: f64,
    pub duration: f64,
    pub omega_dd_hz: f64,
    pub phi_dd: f64,
    pub walsh_order: u32,
    pub ramp: f64,
    pub walsh_delay: f64,
    /// Static qubit detuning during a delay.
    pub qubit_detuning_hz: f64,
}

impl Default for EmbeddedConfig {
    fn default() -> Self {
        Self {
            kind: EmbeddedKind::Ms,
            omega_sb_hz: 380.0,
            delta_hz: 770.0,
            duration: 1.30e-3,
            omega_dd_hz: 152e3,
            phi_dd: 0.5 * PI,
            walsh_order: 15,
            ramp: 1.6e-6,
            walsh_delay: 24e-6,
            qubit_detuning_hz: 0.0,
        }
    }
}

impl EmbeddedConfig {
    pub fn embedded(&self) -> Result<Embedded, CliError> {
        positive("embedded.duration", self.duration)?;
        non_negative("embedded.omega_sb_hz", self.omega_sb_hz)?;
        non_negative("embedded.omega_dd_hz", self.omega_dd_hz)?;
        let pulse = MsPulse {
            omega_sb: hz(self.omega_sb_hz),
            delta: hz(self.delta_hz),
            duration: self.duration,
            omega_dd: hz(self.omega_dd_hz),
            phi_dd: self.phi_dd,
            walsh_order: self.walsh_order,
            ramp: self.ramp,
            walsh_delay: self.walsh_delay,
            drive_time_phase: true,
        };
        Ok(match self.kind {
            EmbeddedKind::Ms => Embedded::Ms(pulse),
            EmbeddedKind::DdOnly => Embedded::Ms(MsPulse {
                omega_sb: 0.0,
                ..pulse
            }),
            EmbeddedKind::Delay => Embedded::Delay {
                duration: pulse.schedule()?.total_duration,
                qubit_detuning: hz(self.qubit_detuning_hz),
            },
            EmbeddedKind::None => Embedded::None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RbCliConfig {
    pub embedded: EmbeddedConfig,
    pub mode: ModeConfig,
    /// Clifford-to-Clifford period (s).
    pub pair_duration: f64,
    pub lengths: Vec<usize>,
    pub n_seeds: usize,
    pub seed: u64,
    pub fock_dim: usize,
    pub rel_tol: f64,
}

impl Default for RbCliConfig {
    fn default() -> Self {
        let rb = RbConfig::default();
        Self {
            embedded: EmbeddedConfig::default(),
            mode: ModeConfig::default(),
            pair_duration: 1.78e-3,
            lengths: rb.lengths,
            n_seeds: rb.n_seeds,
            seed: rb.base_seed,
            fock_dim: 24,
            rel_tol: 1e-10,
        }
    }
}

impl RbCliConfig {
    pub fn scenario(&self) -> Result<(RbScenario, RbConfig), CliError> {
        let sc = RbScenario {
            embedded: self.embedded.embedded()?,
            mode: self.mode.mode()?,
            pair_duration: self.pair_duration,
        };
        sc.validate().map_err(|e| CliError::Config(e.to_string()))?;
        let cfg = RbConfig {
            lengths: self.lengths.clone(),
            n_seeds: self.n_seeds,
            base_seed: self.seed,
        };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok((sc, cfg))
    }
}
