use std::f64::consts::PI;
use std::io::Write;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use quantum_core::{expm_hermitian, identity, kron, pauli, Pauli};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{optimize_currents, ChainError, ChainSpec};

/// Two-qubit unitary `exp[−i(π/8)(σₓ⊗1 − ζ·1⊗σₓ)²]` of a loop-closed force
/// of relative strength `ζ` on the second (spectator) qubit.
pub fn magnus_unitary(zeta: f64) -> Array2<C64> {
    let x = pauli(Pauli::X);
    let i2 = identity(2);
    let s = kron(&x, &i2) - kron(&i2, &x).mapv(|v| v * zeta);
    expm_hermitian(&s.dot(&s), C64::new(0.0, -PI / 8.0))
}

/// Basis-averaged spectator impurity, `(1 − cos πζ)/6`.
pub fn crosstalk(zeta: f64) -> f64 {
    (1.0 - (PI * zeta).cos()) / 6.0
}

/// Spectator impurity `1 − Tr ρ²` averaged over the six Pauli eigenstates,
/// with the first (addressed) qubit starting in `|0⟩`.
pub fn spectator_impurity(u: &Array2<C64>) -> f64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| C64::new(re, im);
    let inputs = [
        [c(1.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(1.0, 0.0)],
        [c(h, 0.0), c(h, 0.0)],
        [c(h, 0.0), c(-h, 0.0)],
        [c(h, 0.0), c(0.0, h)],
        [c(h, 0.0), c(0.0, -h)],
    ];
    let total: f64 = inputs
        .iter()
        .map(|s| {
            let psi = u.dot(&Array1::from(vec![s[0], s[1], c(0.0, 0.0), c(0.0, 0.0)]));
            let mut rho = Array2::<C64>::zeros((2, 2));
            for a in 0..2 {
                for b in 0..2 {
                    rho[[a, b]] = (0..2).map(|q| psi[2 * q + a] * psi[2 * q + b].conj()).sum();
                }
            }
            1.0 - rho.iter().map(|z| z.norm_sqr()).sum::<f64>()
        })
        .sum();
    total / inputs.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCrosstalk {
    pub i: usize,
    pub j: usize,
    pub max_crosstalk: f64,
    pub mean_crosstalk: f64,
    pub worst_ion: usize,
    /// Crosstalk per ion; zero at the addressed ions.
    pub per_ion: Vec<f64>,
    /// Largest DD-suppressed quadrature bound at a non-addressed ion.
    pub max_quadrature_floor: f64,
    pub converged: bool,
    pub sb_residual: f64,
    pub dd_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkReport {
    pub n_ions: usize,
    pub pairs: Vec<PairCrosstalk>,
    /// Mean over pairs of the per-pair mean over non-addressed ions.
    pub chain_mean: f64,
    /// Mean over every (pair, non-addressed ion) combination.
    pub pooled_mean: f64,
    /// Mean over pairs of the worst non-addressed ion.
    pub mean_of_max: f64,
    pub max: f64,
    pub unconverged_pairs: usize,
}

/// Crosstalk at every non-addressed ion when addressing `pair`.
pub fn pair_crosstalk(spec: &ChainSpec, pair: (usize, usize)) -> Result<PairCrosstalk, ChainError> {
    let sol = optimize_currents(spec, pair)?;
    let zeta = sol.zeta();
    let per_ion: Vec<f64> = zeta
        .iter()
        .enumerate()
        .map(|(k, &z)| if sol.is_addressed(k) { 0.0 } else { crosstalk(z) })
        .collect();
    let others: Vec<usize> = (0..spec.n_ions).filter(|&k| !sol.is_addressed(k)).collect();
    let worst_ion = others
        .iter()
        .copied()
        .max_by(|&a, &b| per_ion[a].total_cmp(&per_ion[b]))
        .unwrap_or(pair.0);
    let mean = if others.is_empty() {
        0.0
    } else {
        others.iter().map(|&k| per_ion[k]).sum::<f64>() / others.len() as f64
    };
    let floor = others.iter().map(|&k| sol.ions[k].quadrature_floor).fold(0.0, f64::max);
    Ok(PairCrosstalk {
        i: pair.0,
        j: pair.1,
        max_crosstalk: per_ion[worst_ion],
        mean_crosstalk: mean,
        worst_ion,
        per_ion,
        max_quadrature_floor: floor,
        converged: sol.converged,
        sb_residual: sol.sb_residual,
        dd_residual: sol.dd_residual,
    })
}

/// Crosstalk for all `n(n−1)/2` pairs, evaluated in parallel and ordered by
/// pair index.
pub fn chain_crosstalk_map(spec: &ChainSpec) -> Result<CrosstalkReport, ChainError> {
    spec.validate()?;
    let n = spec.n_ions;
    let list: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let pairs = list
        .par_iter()
        .map(|&p| pair_crosstalk(spec, p))
        .collect::<Result<Vec<_>, _>>()?;
    let np = pairs.len() as f64;
    let chain_mean = pairs.iter().map(|p| p.mean_crosstalk).sum::<f64>() / np;
    let (mut pooled, mut count) = (0.0, 0usize);
    for p in &pairs {
        for (k, v) in p.per_ion.iter().enumerate() {
            if k != p.i && k != p.j {
                pooled += v;
                count += 1;
            }
        }
    }
    Ok(CrosstalkReport {
        n_ions: n,
        chain_mean,
        pooled_mean: if count > 0 { pooled / count as f64 } else { 0.0 },
        mean_of_max: pairs.iter().map(|p| p.max_crosstalk).sum::<f64>() / np,
        max: pairs.iter().map(|p| p.max_crosstalk).fold(0.0, f64::max),
        unconverged_pairs: pairs.iter().filter(|p| !p.converged).count(),
        pairs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMetric {
    Max,
    Mean,
}

/// Symmetric `n×n` matrix of a per-pair metric, blank on the diagonal.
pub fn write_pair_matrix_csv<W: Write>(
    report: &CrosstalkReport,
    metric: PairMetric,
    out: W,
) -> csv::Result<()> {
    let n = report.n_ions;
    let mut m = vec![vec![None; n]; n];
    for p in &report.pairs {
        let v = match metric {
            PairMetric::Max => p.max_crosstalk,
            PairMetric::Mean => p.mean_crosstalk,
        };
        m[p.i][p.j] = Some(v);
        m[p.j][p.i] = Some(v);
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["ion".to_string()];
    header.extend((0..n).map(|k| k.to_string()));
    w.write_record(&header)?;
    for (i, row) in m.iter().enumerate() {
        let mut rec = vec![i.to_string()];
        rec.extend(row.iter().map(|v| v.map_or(String::new(), |v| format!("{v:e}"))));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
