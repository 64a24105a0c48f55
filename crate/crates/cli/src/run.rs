use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use benchmarking::{run_rb, write_rb_csv, ChannelOptions, MsPulse};
use chain::{chain_crosstalk_map, gate_error_sweep, write_pair_matrix_csv, GateOptions, PairMetric};
use fieldmodel::{field_at, phase_profile, predicted_p0, threshold_intervals, TiltProfile, ZoneModel};
use hamiltonians::DriveParams;
use lindblad::{
    evolve_guarded, heating_decoherence_exponent, p0_analytic_thermal, sdd_amplitude,
    suppression_error_scan, time_for_p0, EvolveOptions, SingleIonDrive, GUARD_TOLERANCE,
};
use ndarray::Array2;
use num_complex::Complex64 as C64;
use pulses::build_schedule;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use crate::config::*;
use crate::{CliError, Command, Overrides, RunReport};

fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn apply(fock_dim: &mut usize, rel_tol: &mut f64, o: &Overrides) {
    if let Some(n) = o.fock_dim {
        *fock_dim = n;
    }
    if let Some(t) = o.tol {
        *rel_tol = t;
    }
}

fn csv_writer(out: &Path, name: &str) -> Result<csv::Writer<BufWriter<File>>, CliError> {
    Ok(csv::Writer::from_writer(BufWriter::new(File::create(out.join(name))?)))
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T) -> Result<(), CliError> {
    fs::write(out.join(name), serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn ground() -> Array2<C64> {
    let mut q = Array2::zeros((2, 2));
    q[[0, 0]] = C64::new(1.0, 0.0);
    q
}

fn report<T: Serialize>(config: &T, outputs: &[&str], guards: serde_json::Value) -> Result<RunReport, CliError> {
    Ok(RunReport {
        config: serde_json::to_value(config)?,
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
        guards,
    })
}

/// Run one subcommand, writing its outputs into `out`.
pub fn run(
    command: Command,
    config: Option<&Path>,
    overrides: &Overrides,
    out: &Path,
) -> Result<RunReport, CliError> {
    match command {
        Command::DecayScan => decay_scan(load(config)?, overrides, out),
        Command::DdPhaseScan => dd_phase_scan(load(config)?, overrides, out),
        Command::ZoneScan => zone_scan(load(config)?, out),
        Command::SuppressionScan => suppression_scan(load(config)?, overrides, out),
        Command::ChainCrosstalk => chain_crosstalk(load(config)?, out),
        Command::GateFidelity => gate_fidelity(load(config)?, overrides, out),
        Command::Rb => rb(load(config)?, overrides, out),
        Command::FieldMap => field_map(load(config)?, out),
    }
}

fn decay_scan(mut cfg: DecayConfig, o: &Overrides, out: &Path) -> Result<RunReport, CliError> {
    apply(&mut cfg.fock_dim, &mut cfg.rel_tol, o);
    cfg.validate()?;
    let base = cfg.mode.mode()?;
    let omega_sb = 2.0 * std::f64::consts::PI * cfg.omega_sb_hz;
    let delta = 2.0 * std::f64::consts::PI * cfg.delta_hz;
    let pulse = MsPulse::bare(omega_sb, delta, cfg.duration);
    let schedule = pulse.schedule()?;
    let drive = SingleIonDrive::new(schedule, pulse.params(), base.omega_m);
    let opts = EvolveOptions {
        samples: cfg.samples,
        ..EvolveOptions::with_tol(cfg.rel_tol)
    };
    let runs = cfg
        .heating_rates
        .par_iter()
        .map(|&rate| evolve_guarded(&drive, &base.with_heating(rate), &ground(), cfg.fock_dim, &opts))
        .collect::<Result<Vec<_>, _>>()?;

    let mut w = csv_writer(out, "decay.csv")?;
    let mut header = vec!["t".to_string()];
    for r in &cfg.heating_rates {
        header.push(format!("p0_rate_{r}"));
        header.push(format!("n_mean_rate_{r}"));
        header.push(format!("p0_analytic_rate_{r}"));
    }
    w.write_record(&header)?;
    for (k, s) in runs[0].observables.iter().enumerate() {
        let mut rec = vec![s.t.to_string()];
        for (run, &rate) in runs.iter().zip(&cfg.heating_rates) {
            let o = &run.observables[k];
            let a = sdd_amplitude(omega_sb, delta, s.t);
            let gamma = heating_decoherence_exponent(omega_sb, delta, s.t, rate);
            let coherence = 2.0 * p0_analytic_thermal(a, base.n_bar) - 1.0;
            rec.push(o.p0.to_string());
            rec.push(o.n_mean.to_string());
            rec.push((0.5 * (1.0 + coherence * (-gamma).exp())).to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    let guards = json!({
        "guard_tolerance": GUARD_TOLERANCE,
        "guard_deviation": runs.iter().map(|r| r.stats.guard_deviation).collect::<Vec<_>>(),
        "max_trace_deviation": runs.iter().map(|r| r.stats.max_trace_deviation).collect::<Vec<_>>(),
    });
    report(&cfg, &["decay.csv"], guards)
}

fn dd_phase_scan(mut cfg: DdPhaseConfig, o: &Overrides, out: &Path) -> Result<RunReport, CliError> {
    apply(&mut cfg.fock_dim, &mut cfg.rel_tol, o);
    cfg.validate()?;
    let mode = cfg.mode.mode()?;
    let omega_sb = 2.0 * std::f64::consts::PI * cfg.omega_sb_hz;
    let duration = time_for_p0(omega_sb, cfg.p0_target);
    let schedule = build_schedule(duration, cfg.walsh_order, cfg.dd_ramp, cfg.sb_ramp, 0.0)?;
    let opts = EvolveOptions {
        samples: 1,
        ..EvolveOptions::with_tol(cfg.rel_tol)
    };
    let phases = cfg.phases()?;
    let results = phases
        .par_iter()
        .map(|&phi| {
            let params = DriveParams {
                omega_sb,
                omega_dd: cfg.dd_ratio * omega_sb,
                phi_dd: phi,
                ..DriveParams::default()
            };
            let drive = SingleIonDrive::new(schedule.clone(), params, mode.omega_m);
            let r = evolve_guarded(&drive, &mode, &ground(), cfg.fock_dim, &opts)?;
            Ok((r.final_p0(), r.stats.guard_deviation.unwrap_or(0.0)))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut w = csv_writer(out, "dd_phase.csv")?;
    w.write_record(["phi_dd", "p0", "guard_deviation"])?;
    for (phi, (p0, dev)) in phases.iter().zip(&results) {
        w.write_record([phi.to_string(), p0.to_string(), dev.to_string()])?;
    }
    w.flush()?;
    let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
    report(
        &cfg,
        &["dd_phase.csv"],
        json!({ "guard_tolerance": GUARD_TOLERANCE, "max_guard_deviation": worst }),
    )
}

fn zone_scan(cfg: ZoneConfig, out: &Path) -> Result<RunReport, CliError> {
    let geometry = cfg.geometry()?;
    let grid = cfg.grid()?;
    let profile = phase_profile(&geometry, &grid, cfg.u_zpf, &TiltProfile::constant(cfg.tilt_theta))?;
    let model = ZoneModel {
        p0_undriven: cfg.p0_undriven,
        dd_phase_offset: cfg.dd_phase_offset,
    };
    let p0 = predicted_p0(&profile, &model)?;
    if !(cfg.threshold > 0.5 && cfg.threshold < 1.0) {
        return Err(CliError::Config(format!("`threshold` {} outside (0.5, 1)", cfg.threshold)));
    }
    let intervals = threshold_intervals(&profile.x, &p0, cfg.threshold);

    let mut w = csv_writer(out, "zone_profile.csv")?;
    w.write_record(["x", "phi_field", "phi_grad", "b_abs", "db_abs", "p0"])?;
    for (i, p) in p0.iter().enumerate() {
        w.write_record([
            profile.x[i].to_string(),
            profile.phi_field[i].to_string(),
            profile.phi_grad[i].to_string(),
            profile.b_abs[i].to_string(),
            profile.db_abs[i].to_string(),
            p.to_string(),
        ])?;
    }
    w.flush()?;
    let zone = json!({
        "threshold": cfg.threshold,
        "intervals": intervals,
        "widths": intervals.iter().map(|(a, b)| b - a).collect::<Vec<_>>(),
        "min_p0": p0.iter().copied().fold(f64::INFINITY, f64::min),
    });
    write_json(out, "zone.json", &zone)?;
    report(&cfg, &["zone_profile.csv", "zone.json"], json!({}))
}

fn field_map(cfg: FieldMapConfig, out: &Path) -> Result<RunReport, CliError> {
    let grid = cfg.grid()?;
    let mut w = csv_writer(out, "field_map.csv")?;
    w.write_record(["x", "bx_re", "bx_im", "b_abs", "phi_field", "phi_grad", "db_abs", "eta"])?;
    for &x in &grid {
        let s = field_at(&cfg.geometry, x, cfg.u_zpf, cfg.tilt_theta)?;
        w.write_record([
            x.to_string(),
            s.bx.re.to_string(),
            s.bx.im.to_string(),
            s.bx.norm().to_string(),
            s.phi_field.to_string(),
            s.phi_grad.to_string(),
            s.dbx_du.norm().to_string(),
            s.eta.to_string(),
        ])?;
    }
    w.flush()?;
    report(&cfg, &["field_map.csv"], json!({}))
}

fn suppression_scan(mut cfg: SuppressionConfig, o: &Overrides, out: &Path) -> Result<RunReport, CliError> {
    apply(&mut cfg.fock_dim, &mut cfg.rel_tol, o);
    let scenario = cfg.scenario()?;
    let points = suppression_error_scan(&cfg.ratios, &scenario)?;
    // Guard at the smallest ratio, where the residual displacement is largest.
    let r_min = cfg.ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let doubled = lindblad::SuppressionScenario {
        fock_dim: 2 * scenario.fock_dim,
        ..scenario
    };
    let deviation = (scenario.error_at(r_min)? - doubled.error_at(r_min)?).abs();
    if !(deviation <= GUARD_TOLERANCE) {
        return Err(CliError::Convergence(format!(
            "1 - P0 at ratio {r_min} changed by {deviation:e} when fock_dim went {} -> {}",
            scenario.fock_dim, doubled.fock_dim
        )));
    }

    let mut w = csv_writer(out, "suppression.csv")?;
    w.write_record(["ratio", "max_error", "envelope_coefficient", "bound"])?;
    for p in &points {
        w.write_record([
            p.ratio.to_string(),
            p.max_error.to_string(),
            p.envelope_coefficient.to_string(),
            (8.0 / (p.ratio * p.ratio)).to_string(),
        ])?;
    }
    w.flush()?;
    let mut w = csv_writer(out, "suppression_points.csv")?;
    w.write_record(["centre", "ratio", "error"])?;
    for p in &points {
        for (r, e) in &p.errors {
            w.write_record([p.ratio.to_string(), r.to_string(), e.to_string()])?;
        }
    }
    w.flush()?;
    report(
        &cfg,
        &["suppression.csv", "suppression_points.csv"],
        json!({ "guard_tolerance": GUARD_TOLERANCE, "guard_ratio": r_min, "guard_deviation": deviation }),
    )
}

fn chain_crosstalk(cfg: ChainConfig, out: &Path) -> Result<RunReport, CliError> {
    let spec = cfg.spec()?;
    let map = chain_crosstalk_map(&spec)?;
    write_json(out, "report.json", &map)?;
    write_pair_matrix_csv(&map, PairMetric::Max, BufWriter::new(File::create(out.join("crosstalk_max.csv"))?))?;
    write_pair_matrix_csv(&map, PairMetric::Mean, BufWriter::new(File::create(out.join("crosstalk_mean.csv"))?))?;
    if map.unconverged_pairs > 0 {
        return Err(CliError::Convergence(format!(
            "current solver did not converge for {} pairs (see report.json)",
            map.unconverged_pairs
        )));
    }
    report(
        &cfg,
        &["report.json", "crosstalk_max.csv", "crosstalk_mean.csv"],
        json!({ "unconverged_pairs": map.unconverged_pairs }),
    )
}

fn gate_fidelity(mut cfg: GateConfig, o: &Overrides, out: &Path) -> Result<RunReport, CliError> {
    apply(&mut cfg.fock_dim, &mut cfg.rel_tol, o);
    let spec = cfg.validate()?;
    let opts = GateOptions {
        fock_dim: cfg.fock_dim,
        rel_tol: cfg.rel_tol,
        dd: cfg.dd,
        dd_gradient: cfg.dd_gradient,
    };
    let pair = (cfg.pair[0], cfg.pair[1]);
    let outcomes = gate_error_sweep(&spec, pair, &cfg.displacements, &cfg.n_bars, &opts)?;
    let mut w = csv_writer(out, "gate_fidelity.csv")?;
    w.write_record(["pair_i", "pair_j", "displacement", "n_bar", "infidelity", "guard_deviation"])?;
    for g in &outcomes {
        w.write_record([
            g.pair.0.to_string(),
            g.pair.1.to_string(),
            g.displacement.to_string(),
            g.n_bar.to_string(),
            g.infidelity.to_string(),
            g.guard_deviation.to_string(),
        ])?;
    }
    w.flush()?;
    let worst = outcomes.iter().map(|g| g.guard_deviation).fold(0.0, f64::max);
    report(
        &cfg,
        &["gate_fidelity.csv"],
        json!({ "guard_tolerance": GUARD_TOLERANCE, "max_guard_deviation": worst }),
    )
}

fn rb(mut cfg: RbCliConfig, o: &Overrides, out: &Path) -> Result<RunReport, CliError> {
    apply(&mut cfg.fock_dim, &mut cfg.rel_tol, o);
    if let Some(s) = o.seed {
        cfg.seed = s;
    }
    let (scenario, rb_cfg) = cfg.scenario()?;
    let opts = ChannelOptions {
        fock_dim: cfg.fock_dim,
        rel_tol: cfg.rel_tol,
        ..ChannelOptions::default()
    };
    let result = run_rb(&scenario, &rb_cfg, &opts)?;
    write_json(out, "rb.json", &result)?;
    write_rb_csv(&result, BufWriter::new(File::create(out.join("rb.csv"))?))?;
    let guards = json!({
        "guard_tolerance": GUARD_TOLERANCE,
        "guard_deviation": result.guard_deviation,
        "min_choi_eigenvalue": result.min_choi_eigenvalue,
        "max_trace_defect": result.max_trace_defect,
        "heating_model": result.heating_model,
        "affine_defect": result.affine_defect,
        "fit_converged": result.fit_converged,
    });
    report(&cfg, &["rb.json", "rb.csv"], guards)
}
