use std::io::Write;

use serde::Serialize;

use crate::{EvolutionResult, IntegratorStats};

/// CSV time series with columns `t,P0,n_mean,purity`.
pub fn write_csv<W: Write>(result: &EvolutionResult, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "P0", "n_mean", "purity"])?;
    for s in &result.observables {
        w.write_record([
            s.t.to_string(),
            s.p0.to_string(),
            s.n_mean.to_string(),
            s.purity.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolutionSummary {
    pub duration: f64,
    pub final_p0: f64,
    pub final_n_mean: f64,
    pub final_purity: f64,
    pub qubit_dim: usize,
    pub fock_dim: usize,
    pub stats: IntegratorStats,
}

pub fn summary_json(result: &EvolutionResult) -> serde_json::Result<String> {
    let last = result.observables.last().copied();
    let dims = result.rho_final.dims();
    let s = EvolutionSummary {
        duration: last.map_or(0.0, |s| s.t),
        final_p0: last.map_or(f64::NAN, |s| s.p0),
        final_n_mean: last.map_or(f64::NAN, |s| s.n_mean),
        final_purity: last.map_or(f64::NAN, |s| s.purity),
        qubit_dim: dims.qubit,
        fock_dim: dims.fock,
        stats: result.stats,
    };
    serde_json::to_string_pretty(&s)
}
