use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{fmt_f64, require, table_file, BackendChoice, ExperimentOutput, Failure, Table};
use crate::error::Result;
use crate::models::ChainSpec;
use crate::protocol::{self, Backend};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImperfectCopyParams {
    pub m0: f64,
    pub ls: Vec<usize>,
    pub dms: Vec<f64>,
    pub seed: u64,
    pub backend: BackendChoice,
    pub tolerance: f64,
}

impl Default for ImperfectCopyParams {
    fn default() -> Self {
        Self {
            m0: 0.3,
            ls: vec![4, 6, 8],
            dms: vec![0.0, 0.05, 0.1],
            seed: 0,
            backend: BackendChoice::Auto,
            tolerance: 1e-10,
        }
    }
}

/// Half-system `|+⟩` measurement between the chain ground state at `m0` and
/// a copy at `m0 + dm`: entropy of `A_R` and fidelity to the ideal `|−⟩`
/// product. The seed is recorded but unused, since both layers are ground states.
pub fn imperfect_copy(params: &ImperfectCopyParams) -> Result<ExperimentOutput> {
    require(!params.ls.is_empty() && !params.dms.is_empty(), "ls and dms must not be empty")?;
    let mut ls = params.ls.clone();
    ls.sort_unstable();
    let mut grid = Vec::new();
    for &l in &ls {
        require(l >= 2 && l % 2 == 0, "every L must be even and at least 2")?;
        for b in params.backend.resolve(l) {
            require(b != Backend::Oracle || 2 * l <= crate::fock::MAX_MODES, "the oracle backend needs L <= 8")?;
            for &dm in &params.dms {
                grid.push((l, dm, b));
            }
        }
    }
    let rows: Vec<Result<Option<(f64, f64)>>> = grid
        .par_iter()
        .map(|&(l, dm, backend)| {
            let spec = ChainSpec::half_filled(l, params.m0)?;
            let r = protocol::imperfect_copy_run(&spec, dm, backend)?;
            Ok(match (r.entropy_ar(), r.fidelity_to_ideal) {
                (Some(s), Some(f)) if !r.is_zero() => Some((s, f)),
                _ => None,
            })
        })
        .collect();
    let rows: Vec<Option<(f64, f64)>> = rows.into_iter().collect::<Result<_>>()?;

    let mut backends: Vec<Backend> = Vec::new();
    for g in &grid {
        if !backends.contains(&g.2) {
            backends.push(g.2);
        }
    }
    let mut tables: Vec<Table> = backends
        .iter()
        .map(|b| Table::new(&table_file("imperfect_copy", *b, backends.len()), &["L", "dm", "entropy_log2_units", "fidelity"]))
        .collect();
    let mut failures = Vec::new();
    for (&(l, dm, backend), row) in grid.iter().zip(&rows) {
        let t = &mut tables[backends.iter().position(|b| *b == backend).unwrap_or(0)];
        let Some((s, f)) = *row else {
            failures.push(Failure::new("zero-probability", format!("L = {l}, dm = {dm}")));
            t.push(vec![l.to_string(), fmt_f64(dm), "".into(), "".into()]);
            continue;
        };
        let bound = (l / 2) as f64 * LN_2;
        if s > bound + params.tolerance {
            failures.push(Failure::new("entropy-bound", format!("L = {l}, dm = {dm}: S = {s} > {bound}")));
        }
        if dm == 0.0 && (1.0 - f).abs() > params.tolerance {
            failures.push(Failure::new("identical-copy", format!("L = {l}: fidelity {f}")));
        }
        if dm != 0.0 && f >= 1.0 - params.tolerance {
            failures.push(Failure::new("perturbed-copy", format!("L = {l}, dm = {dm}: fidelity {f} not below 1")));
        }
        t.push(vec![l.to_string(), fmt_f64(dm), fmt_f64(s / LN_2), fmt_f64(f)]);
    }
    // fidelity must not grow with L at fixed dm
    for &backend in &backends {
        for &dm in params.dms.iter().filter(|&&d| d != 0.0) {
            let series: Vec<(usize, f64)> = grid
                .iter()
                .zip(&rows)
                .filter(|(g, _)| g.1 == dm && g.2 == backend)
                .filter_map(|(g, r)| r.map(|(_, f)| (g.0, f)))
                .collect();
            for w in series.windows(2) {
                if w[1].1 > w[0].1 + params.tolerance {
                    failures.push(Failure::new(
                        "fidelity-trend",
                        format!("dm = {dm}: fidelity rises from {} at L = {} to {} at L = {}", w[0].1, w[0].0, w[1].1, w[1].0),
                    ));
                }
            }
        }
    }
    let summary = grid
        .iter()
        .zip(&rows)
        .filter_map(|(g, r)| r.map(|(s, f)| format!("L = {:>3}, dm = {:<5} S = {:.6} log 2, F = {:.10}", g.0, g.1, s / LN_2, f)))
        .collect();
    Ok(ExperimentOutput {
        experiment: "imperfect-copy",
        tables,
        failures,
        report: json!({ "m0": params.m0 }),
        summary,
    })
}
