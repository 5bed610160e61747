use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{fmt_f64, require, table_file, BackendChoice, ExperimentOutput, Failure, Table};
use crate::error::Result;
use crate::models::{self, ChainSpec};
use crate::orbital::OrbitalMatrix;
use crate::protocol::{self, Backend, RungProjector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    /// Half-system measurement, sweeping L.
    Left,
    /// Partial measurement at fixed L, sweeping n_m.
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    /// Ground state of the massless open chain.
    Critical,
    /// Haar-random half-filled Slater determinant.
    Random,
}

fn initial_state(kind: StateKind, l: usize, seed: u64) -> Result<OrbitalMatrix> {
    match kind {
        StateKind::Critical => models::ground_state_orbitals(&ChainSpec::half_filled(l, 0.0)?),
        StateKind::Random => models::random_slater(l, l / 2, seed),
    }
}

/// Mean entropy, mean probability and worst deviation from `expected`.
struct Cell {
    entropy: f64,
    probability: f64,
    excluded: usize,
    max_dev: f64,
    samples: usize,
}

fn summarize(samples: &[(f64, f64)], excluded: usize, expected: f64) -> Cell {
    let k = samples.len().max(1) as f64;
    Cell {
        entropy: samples.iter().map(|s| s.0).sum::<f64>() / k,
        probability: samples.iter().map(|s| s.1).sum::<f64>() / k,
        excluded,
        max_dev: samples.iter().map(|s| (s.0 - expected).abs()).fold(0.0, f64::max),
        samples: samples.len(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EeSweepParams {
    pub mode: SweepMode,
    pub state: StateKind,
    /// System sizes for the left mode.
    pub ls: Vec<usize>,
    /// System size for the right mode.
    pub l: usize,
    /// Measured-rung counts for the right mode; empty means 0..=L/2.
    pub n_ms: Vec<usize>,
    /// Random states (left mode) or random measured subsets (right mode).
    pub trials: usize,
    pub seed: u64,
    pub backend: BackendChoice,
    pub tolerance: f64,
}

impl Default for EeSweepParams {
    fn default() -> Self {
        Self {
            mode: SweepMode::Left,
            state: StateKind::Critical,
            ls: vec![4, 6, 8, 10, 12],
            l: 6,
            n_ms: Vec::new(),
            trials: 5,
            seed: 0,
            backend: BackendChoice::Auto,
            tolerance: 1e-8,
        }
    }
}

const EE_HEADER: [&str; 8] = [
    "mode",
    "L",
    "n_m",
    "entropy_nats",
    "entropy_log2_units",
    "probability",
    "trials_excluded",
    "seed",
];

/// `S(A_R)` after uniform `|+⟩` outcomes: `(L/2) log 2` for half-system
/// measurements and `n_m log 2` for partial ones.
pub fn ee_sweep(params: &EeSweepParams) -> Result<ExperimentOutput> {
    require(params.trials > 0, "trials must be positive")?;
    let mode_name = match params.mode {
        SweepMode::Left => "left",
        SweepMode::Right => "right",
    };
    // (L, n_m, backend) grid points in output order
    let mut grid = Vec::new();
    match params.mode {
        SweepMode::Left => {
            require(!params.ls.is_empty(), "ls must not be empty")?;
            for &l in &params.ls {
                require(l >= 2 && l % 2 == 0, "every L must be even and at least 2")?;
                for b in params.backend.resolve(l) {
                    grid.push((l, l / 2, b));
                }
            }
        }
        SweepMode::Right => {
            let l = params.l;
            require(l >= 2 && l % 2 == 0, "L must be even and at least 2")?;
            let n_ms: Vec<usize> = if params.n_ms.is_empty() { (0..=l / 2).collect() } else { params.n_ms.clone() };
            require(n_ms.iter().all(|&n| 2 * n <= l), "every n_m must be at most L/2")?;
            for b in params.backend.resolve(l) {
                for &n in &n_ms {
                    grid.push((l, n, b));
                }
            }
        }
    }
    for &(l, _, b) in &grid {
        require(b != Backend::Oracle || 2 * l <= crate::fock::MAX_MODES, "the oracle backend needs L <= 8")?;
    }
    let plus = RungProjector::bell_plus();
    let cells: Vec<Result<Cell>> = grid
        .par_iter()
        .map(|&(l, n_m, backend)| {
            let expected = n_m as f64 * LN_2;
            match params.mode {
                SweepMode::Left => {
                    let measured: Vec<usize> = (0..l / 2).collect();
                    let mut samples = Vec::new();
                    let mut excluded = 0;
                    let trials = if params.state == StateKind::Critical { 1 } else { params.trials };
                    for t in 0..trials {
                        let phi = initial_state(params.state, l, params.seed.wrapping_add(t as u64))?;
                        let r = protocol::run_uniform_measurement(&phi, &measured, &plus, backend)?;
                        match r.entropy_ar() {
                            Some(s) if !r.is_zero() => samples.push((s, r.probability)),
                            _ => excluded += 1,
                        }
                    }
                    Ok(summarize(&samples, excluded, expected))
                }
                SweepMode::Right => {
                    let phi = initial_state(params.state, l, params.seed)?;
                    let pm = protocol::partial_measurement_entropy(&phi, n_m, &plus, params.trials, params.seed, backend)?;
                    let samples: Vec<(f64, f64)> = pm.samples.iter().map(|s| (s.entropy, s.probability)).collect();
                    Ok(summarize(&samples, pm.excluded, expected))
                }
            }
        })
        .collect();
    let cells: Vec<Cell> = cells.into_iter().collect::<Result<_>>()?;

    let backends = backends_in(&grid);
    let mut tables: Vec<Table> = backends
        .iter()
        .map(|b| Table::new(&table_file("ee_sweep", *b, backends.len()), &EE_HEADER))
        .collect();
    let mut failures = Vec::new();
    for (&(l, n_m, backend), c) in grid.iter().zip(&cells) {
        if c.max_dev >= params.tolerance || c.samples == 0 {
            failures.push(Failure::new(
                "entropy-law",
                format!(
                    "mode {mode_name}, L = {l}, n_m = {n_m}, {}: max deviation {:.3e} over {} samples",
                    backend.name(),
                    c.max_dev,
                    c.samples
                ),
            ));
        }
        let t = &mut tables[backends.iter().position(|b| *b == backend).unwrap_or(0)];
        t.push(vec![
            mode_name.to_string(),
            l.to_string(),
            n_m.to_string(),
            fmt_f64(c.entropy),
            fmt_f64(c.entropy / LN_2),
            fmt_f64(c.probability),
            c.excluded.to_string(),
            params.seed.to_string(),
        ]);
    }
    check_backend_agreement(&grid, &cells.iter().map(|c| c.entropy).collect::<Vec<_>>(), params.tolerance, &mut failures);
    let worst = cells.iter().map(|c| c.max_dev).fold(0.0, f64::max);
    Ok(ExperimentOutput {
        experiment: "ee-sweep",
        tables,
        summary: vec![format!(
            "{} grid points, worst deviation from n_m log 2: {worst:.3e} nats",
            grid.len()
        )],
        failures,
        report: json!({ "max_deviation_nats": worst }),
    })
}

fn backends_in(grid: &[(usize, usize, Backend)]) -> Vec<Backend> {
    let mut v: Vec<Backend> = Vec::new();
    for g in grid {
        if !v.contains(&g.2) {
            v.push(g.2);
        }
    }
    v
}

/// When both backends ran, matching grid points must agree.
fn check_backend_agreement(grid: &[(usize, usize, Backend)], values: &[f64], tol: f64, failures: &mut Vec<Failure>) {
    for (i, a) in grid.iter().enumerate() {
        if a.2 != Backend::Oracle {
            continue;
        }
        for (j, b) in grid.iter().enumerate() {
            if b.2 == Backend::Gaussian && a.0 == b.0 && a.1 == b.1 && (values[i] - values[j]).abs() >= tol {
                failures.push(Failure::new(
                    "backend-agreement",
                    format!("L = {}, n_m = {}: oracle {} vs gaussian {}", a.0, a.1, values[i], values[j]),
                ));
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImperfectBellParams {
    pub l: usize,
    pub epsilons: Vec<f64>,
    /// Empty means 0..=L/2.
    pub n_ms: Vec<usize>,
    pub trials: usize,
    pub state: StateKind,
    pub seed: u64,
    pub backend: BackendChoice,
    pub tolerance: f64,
}

impl Default for ImperfectBellParams {
    fn default() -> Self {
        Self {
            l: 10,
            epsilons: vec![-0.9, -0.5, 0.0, 0.5, 0.9],
            n_ms: Vec::new(),
            trials: 5,
            state: StateKind::Random,
            seed: 0,
            backend: BackendChoice::Auto,
            tolerance: 1e-8,
        }
    }
}

/// `S(A_R) = n_m S_rung^ε` for uniform `|+⟩^ε` outcomes.
pub fn imperfect_bell(params: &ImperfectBellParams) -> Result<ExperimentOutput> {
    let l = params.l;
    require(l >= 2 && l % 2 == 0, "L must be even and at least 2")?;
    require(params.trials > 0, "trials must be positive")?;
    require(!params.epsilons.is_empty(), "epsilons must not be empty")?;
    require(params.epsilons.iter().all(|e| (-1.0..=1.0).contains(e)), "every ε must lie in [-1, 1]")?;
    let n_ms: Vec<usize> = if params.n_ms.is_empty() { (0..=l / 2).collect() } else { params.n_ms.clone() };
    require(n_ms.iter().all(|&n| 2 * n <= l), "every n_m must be at most L/2")?;
    let backends = params.backend.resolve(l);
    require(
        backends.iter().all(|&b| b != Backend::Oracle || 2 * l <= crate::fock::MAX_MODES),
        "the oracle backend needs L <= 8",
    )?;
    let phi = initial_state(params.state, l, params.seed)?;
    let mut grid = Vec::new();
    for &b in &backends {
        for &eps in &params.epsilons {
            for &n in &n_ms {
                grid.push((eps, n, b));
            }
        }
    }
    let rows: Vec<Result<(f64, f64, f64)>> = grid
        .par_iter()
        .map(|&(eps, n_m, backend)| {
            let proj = RungProjector::epsilon_plus(eps)?;
            let predicted = n_m as f64 * protocol::rung_entropy_epsilon(eps);
            let pm = protocol::partial_measurement_entropy(&phi, n_m, &proj, params.trials, params.seed, backend)?;
            let k = pm.samples.len().max(1) as f64;
            let mean = pm.samples.iter().map(|s| s.entropy).sum::<f64>() / k;
            let residual = pm
                .samples
                .iter()
                .map(|s| (s.entropy - predicted).abs())
                .fold(if pm.samples.is_empty() { f64::INFINITY } else { 0.0 }, f64::max);
            Ok((mean, predicted, residual))
        })
        .collect();
    let rows: Vec<(f64, f64, f64)> = rows.into_iter().collect::<Result<_>>()?;

    let mut tables: Vec<Table> = backends
        .iter()
        .map(|b| {
            Table::new(
                &table_file("imperfect_bell", *b, backends.len()),
                &["epsilon", "n_m", "entropy_nats", "predicted", "residual"],
            )
        })
        .collect();
    let mut failures = Vec::new();
    for (&(eps, n_m, backend), &(mean, predicted, residual)) in grid.iter().zip(&rows) {
        if !(residual < params.tolerance) {
            failures.push(Failure::new(
                "imperfect-bell-law",
                format!("ε = {eps}, n_m = {n_m}, {}: residual {residual:.3e}", backend.name()),
            ));
        }
        let t = &mut tables[backends.iter().position(|b| *b == backend).unwrap_or(0)];
        t.push(vec![fmt_f64(eps), n_m.to_string(), fmt_f64(mean), fmt_f64(predicted), fmt_f64(residual)]);
    }
    let worst = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    Ok(ExperimentOutput {
        experiment: "imperfect-bell",
        tables,
        summary: vec![format!("{} grid points at L = {l}, worst residual {worst:.3e} nats", grid.len())],
        failures,
        report: json!({ "max_residual_nats": worst }),
    })
}
