use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{fmt_f64, fmt_list, require, ExperimentOutput, Failure, Table};
use crate::error::{Error, Result};
use crate::gaussian;
use crate::linalg;
use crate::models;
use crate::orbital::OrbitalMatrix;
use crate::protocol::{self, Backend, PostState, RungProjector};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleCompareParams {
    pub ls: Vec<usize>,
    /// Random states per system size.
    pub states: usize,
    /// Imperfect-Bell parameters run next to `|+⟩` and `|−⟩`.
    pub epsilons: Vec<f64>,
    /// Rung amplitudes of the weak-rung family.
    pub weak_amplitudes: Vec<f64>,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for OracleCompareParams {
    fn default() -> Self {
        Self {
            ls: vec![2, 4, 6],
            states: 4,
            epsilons: vec![0.5],
            weak_amplitudes: vec![1e-3, 1e-4, 1e-5, 1e-6, 1e-7],
            seed: 0,
            tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct Comparison {
    l: usize,
    family: &'static str,
    state_seed: u64,
    copies: &'static str,
    projector: String,
    measured: Vec<usize>,
    p_oracle: f64,
    p_gaussian: f64,
    gamma_deviation: Option<f64>,
    composition_deviation: Option<f64>,
    composition: &'static str,
    entropy_deviation: Option<f64>,
}

fn projectors(eps: &[f64]) -> Result<Vec<(String, RungProjector)>> {
    let mut v = vec![
        ("plus".to_string(), RungProjector::bell_plus()),
        ("minus".to_string(), RungProjector::bell_minus()),
    ];
    for &e in eps {
        v.push((format!("eps_plus({e})"), RungProjector::epsilon_plus(e)?));
        v.push((format!("eps_minus({e})"), RungProjector::epsilon_minus(e)?));
    }
    Ok(v)
}

/// Every measured-rung subset to compare at size `l`: all half-system sets
/// and all sets one rung smaller.
fn measured_sets(l: usize) -> Vec<Vec<usize>> {
    let mut v = linalg::combinations(l, l / 2);
    if l >= 4 {
        v.extend(linalg::combinations(l, l / 2 - 1));
    }
    v
}

/// Layers whose measured rungs are occupied with amplitude `eta` only, so
/// the outcome probability is of order `eta²` and `1 + Γ_M Γ₀` is close to
/// singular.
fn weak_rung_layers(eta: f64) -> Result<Vec<(OrbitalMatrix, OrbitalMatrix, Vec<usize>)>> {
    let f = (1.0 - eta * eta).sqrt();
    let rows = |r: &[&[f64]]| OrbitalMatrix::from_real_rows(&r.iter().map(|x| x.to_vec()).collect::<Vec<_>>());
    Ok(vec![
        (rows(&[&[f, eta]])?, rows(&[&[f, eta]])?, vec![1]),
        (
            rows(&[&[f, eta, 0.0, 0.0], &[0.0, 0.0, f, eta]])?,
            rows(&[&[f, eta, 0.0, 0.0], &[0.0, 0.0, 0.0, 1.0]])?,
            vec![1, 2],
        ),
    ])
}

struct Job {
    l: usize,
    family: &'static str,
    seed: u64,
    copies: &'static str,
    name: String,
    proj: RungProjector,
    upper: OrbitalMatrix,
    lower: OrbitalMatrix,
    measured: Vec<usize>,
}

fn compare(job: Job) -> Result<Comparison> {
    let Job { l, family, seed, copies, name, proj, upper, lower, measured } = job;
    let o = protocol::run_measurement(&upper, &lower, &measured, &proj, Backend::Oracle)?;
    let g = protocol::run_measurement(&upper, &lower, &measured, &proj, Backend::Gaussian)?;
    let mut out = Comparison {
        l,
        family,
        state_seed: seed,
        copies,
        projector: name,
        measured,
        p_oracle: o.probability,
        p_gaussian: g.probability,
        gamma_deviation: None,
        composition_deviation: None,
        composition: "zero",
        entropy_deviation: None,
    };
    let Some(PostState::Fock(psi)) = &o.post else {
        if g.post.is_some() {
            return Err(Error::Precondition(format!(
                "backends disagree on a zero outcome: {} vs {}",
                o.probability, g.probability
            )));
        }
        return Ok(out);
    };
    let oracle = psi.majorana_gamma()?;
    if let Some(PostState::Gaussian(post)) = &g.post {
        out.gamma_deviation = Some(linalg::max_abs(&(&oracle - post.gamma())));
    }
    let g0 = gaussian::gamma_from_orbitals(&upper)?.direct_sum(&gaussian::gamma_from_orbitals(&lower)?);
    let gm = gaussian::projector_gamma(l, &out.measured, &proj)?;
    match gaussian::post_measurement_gamma_report(&g0, &gm) {
        Ok((post, regularized)) => {
            out.composition = if regularized { "regularized" } else { "direct" };
            out.composition_deviation = Some(linalg::max_abs(&(&oracle - post.gamma())));
        }
        Err(_) => out.composition = "refused",
    }
    out.entropy_deviation = match (o.entropy_ar(), g.entropy_ar()) {
        (Some(a), Some(b)) => Some((a - b).abs()),
        _ => None,
    };
    Ok(out)
}

/// Run every protocol instance on both backends and compare probability,
/// `S(A_R)` and the full post-measurement correlation matrix. Each instance
/// also evaluates the two-step composition `(Γ_M × Γ₀) × Γ_M` directly.
///
/// Random states must agree everywhere. The weak-rung family drives the
/// composition onto its near-singular branch, where it may refuse with an
/// error but must never return a wrong `Γ`.
pub fn oracle_compare(params: &OracleCompareParams) -> Result<ExperimentOutput> {
    require(!params.ls.is_empty(), "ls must not be empty")?;
    require(
        params.ls.iter().all(|&l| l >= 2 && l % 2 == 0 && 2 * l <= crate::fock::MAX_MODES),
        "every L must be even with 2 <= L <= 8",
    )?;
    let projs = projectors(&params.epsilons)?;
    let mut jobs = Vec::new();
    for &l in &params.ls {
        for k in 0..params.states {
            let seed = params.seed.wrapping_add((l as u64) << 32).wrapping_add(k as u64);
            let upper = models::random_slater(l, l / 2, seed)?;
            let other = models::random_slater(l, l / 2, seed ^ 0x9e37_79b9_7f4a_7c15)?;
            for (copies, lower) in [("identical", &upper), ("distinct", &other)] {
                for (name, proj) in &projs {
                    for measured in measured_sets(l) {
                        jobs.push(Job {
                            l,
                            family: "random",
                            seed,
                            copies,
                            name: name.clone(),
                            proj: *proj,
                            upper: upper.clone(),
                            lower: lower.clone(),
                            measured,
                        });
                    }
                }
            }
        }
    }
    for (k, eta) in params.weak_amplitudes.iter().enumerate() {
        for (upper, lower, measured) in weak_rung_layers(*eta)? {
            for (name, proj) in &projs {
                jobs.push(Job {
                    l: upper.l(),
                    family: "weak-rung",
                    seed: k as u64,
                    copies: if upper == lower { "identical" } else { "distinct" },
                    name: name.clone(),
                    proj: *proj,
                    upper: upper.clone(),
                    lower: lower.clone(),
                    measured: measured.clone(),
                });
            }
        }
    }
    let rows: Vec<Result<Comparison>> = jobs.into_par_iter().map(compare).collect();
    let rows: Vec<Comparison> = rows.into_iter().collect::<Result<_>>()?;

    let mut failures = Vec::new();
    let mut table = Table::new(
        "oracle_compare.csv",
        &[
            "L",
            "family",
            "state_seed",
            "copies",
            "projector",
            "measured",
            "p_oracle",
            "p_gaussian",
            "gamma_deviation",
            "composition",
            "composition_deviation",
            "entropy_deviation",
        ],
    );
    let opt = |x: Option<f64>| x.map_or_else(String::new, fmt_f64);
    let tol = params.tolerance;
    let within = |x: Option<f64>| x.is_none_or(|d| d <= tol);
    for c in &rows {
        let p_dev = (c.p_oracle - c.p_gaussian).abs() / c.p_oracle.max(c.p_gaussian).max(f64::MIN_POSITIVE);
        let nonzero = c.composition != "zero";
        if nonzero && (p_dev > tol || !within(c.gamma_deviation) || !within(c.entropy_deviation)) {
            failures.push(Failure::new("backend-mismatch", serde_json::to_string(c).unwrap_or_default()));
        }
        if !within(c.composition_deviation) || (c.family == "random" && c.composition == "refused") {
            failures.push(Failure::new("composition-mismatch", serde_json::to_string(c).unwrap_or_default()));
        }
        table.push(vec![
            c.l.to_string(),
            c.family.to_string(),
            c.state_seed.to_string(),
            c.copies.to_string(),
            c.projector.clone(),
            fmt_list(&c.measured),
            fmt_f64(c.p_oracle),
            fmt_f64(c.p_gaussian),
            opt(c.gamma_deviation),
            c.composition.to_string(),
            opt(c.composition_deviation),
            opt(c.entropy_deviation),
        ]);
    }
    let count = |s: &str| rows.iter().filter(|c| c.composition == s).count();
    let max_of = |f: fn(&Comparison) -> Option<f64>| rows.iter().filter_map(f).fold(0.0, f64::max);
    let max_dev = max_of(|c| c.gamma_deviation);
    let max_comp = max_of(|c| c.composition_deviation);
    let summary = vec![
        format!(
            "{} instances, {} with zero probability: max |ΔΓ| backend {max_dev:.3e}, composition {max_comp:.3e}",
            rows.len(),
            count("zero"),
        ),
        format!(
            "composition: {} direct, {} regularized, {} refused; {} mismatches",
            count("direct"),
            count("regularized"),
            count("refused"),
            failures.len()
        ),
    ];
    Ok(ExperimentOutput {
        experiment: "oracle-compare",
        tables: vec![table],
        failures,
        report: json!({
            "instances": rows.len(),
            "zero_probability": count("zero"),
            "composition_direct": count("direct"),
            "composition_regularized": count("regularized"),
            "composition_refused": count("refused"),
            "max_gamma_deviation": max_dev,
            "max_composition_deviation": max_comp,
        }),
        summary,
    })
}
