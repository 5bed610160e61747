use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{fmt_f64, fmt_list, require, ExperimentOutput, Failure, Table};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::models;
use crate::slater;
use crate::Complex64;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PluckerParams {
    pub matrices: usize,
    /// Fixed `"NxL"` shape; random shapes with `N ≤ 4`, `L ≤ 8` otherwise.
    pub shape: Option<String>,
    /// Negative control: flip the sign of the largest single-relation term.
    pub inject_sign_fault: bool,
    pub wavefunction_instances: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for PluckerParams {
    fn default() -> Self {
        Self {
            matrices: 200,
            shape: None,
            inject_sign_fault: false,
            wavefunction_instances: 20,
            seed: 0,
            tolerance: 1e-10,
        }
    }
}

fn parse_shape(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("shape must look like 2x5, got `{s}`"));
    let (n, l) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    let l: usize = l.trim().parse().map_err(|_| bad())?;
    if n == 0 || l <= n {
        return Err(Error::Config(format!("shape {s} needs 1 ≤ N < L")));
    }
    Ok((n, l))
}

fn pick(rng: &mut ChaCha20Rng, l: usize, k: usize) -> Vec<usize> {
    index::sample(rng, l, k).into_vec()
}

struct Instance {
    n: usize,
    l: usize,
    single: f64,
    general: f64,
    sets: String,
}

fn matrix_instance(params: &PluckerParams, shape: Option<(usize, usize)>, k: usize) -> Result<Instance> {
    let mut rng = ChaCha20Rng::seed_from_u64(params.seed.wrapping_add(k as u64));
    let (n, l) = match shape {
        Some(s) => s,
        None => {
            let n = rng.random_range(1..=4);
            (n, rng.random_range(n + 1..=8))
        }
    };
    let m = CMat::from_fn(n, l, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im)
    });
    let a = pick(&mut rng, l, n - 1);
    let b = pick(&mut rng, l, n + 1);
    let mut terms = slater::plucker_single_terms(&m, &a, &b)?;
    if params.inject_sign_fault {
        if let Some(t) = terms.iter_mut().max_by(|x, y| x.norm().total_cmp(&y.norm())) {
            *t = -*t;
        }
    }
    let single = slater::relative_residual(&terms);
    let kk = rng.random_range(0..n);
    let e = pick(&mut rng, l, kk);
    let f = pick(&mut rng, l, n - kk - 1);
    let s = pick(&mut rng, l, n + 1);
    let general = slater::plucker_general_residual(&m, &e, &f, &s)?;
    Ok(Instance {
        n,
        l,
        single,
        general,
        sets: format!("a={} b={} e={} f={} s={}", fmt_list(&a), fmt_list(&b), fmt_list(&e), fmt_list(&f), fmt_list(&s)),
    })
}

/// Residual sweep of the single and general Plücker relations on seeded
/// random matrices, plus amplitude-structure checks of the post-measurement
/// wavefunction on small half-filled states.
pub fn plucker_verify(params: &PluckerParams) -> Result<ExperimentOutput> {
    let shape = params.shape.as_deref().map(parse_shape).transpose()?;
    require(params.matrices > 0, "matrices must be positive")?;
    let instances: Vec<Result<Instance>> = (0..params.matrices)
        .into_par_iter()
        .map(|k| matrix_instance(params, shape, k))
        .collect();
    let instances: Vec<Instance> = instances.into_iter().collect::<Result<_>>()?;

    let mut failures = Vec::new();
    let mut table = Table::new("plucker_verify.csv", &["index", "N", "L", "single_residual", "general_residual", "sets"]);
    for (k, inst) in instances.iter().enumerate() {
        table.push(vec![
            k.to_string(),
            inst.n.to_string(),
            inst.l.to_string(),
            fmt_f64(inst.single),
            fmt_f64(inst.general),
            inst.sets.clone(),
        ]);
        if !(inst.single < params.tolerance) {
            failures.push(Failure::new("single-relation", format!("matrix {k}: residual {:e}", inst.single)));
        }
        if !(inst.general < params.tolerance) {
            failures.push(Failure::new("general-relation", format!("matrix {k}: residual {:e}", inst.general)));
        }
    }

    let reports: Vec<Result<(usize, Vec<usize>, slater::Theorem1Report)>> = (0..params.wavefunction_instances)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha20Rng::seed_from_u64(params.seed.wrapping_add(1 << 40).wrapping_add(k as u64));
            let l = 2 * rng.random_range(1..=3);
            let phi = models::random_slater(l, l / 2, rng.random())?;
            let mut a = pick(&mut rng, l, l / 2);
            a.sort_unstable();
            Ok((l, a.clone(), slater::theorem1_wavefunction_checks(&phi, &a)?))
        })
        .collect();
    let reports: Vec<_> = reports.into_iter().collect::<Result<_>>()?;
    let mut wf = Table::new(
        "plucker_wavefunction.csv",
        &["index", "L", "measured", "probability", "max_overlap_amplitude", "max_sign_deviation", "passed"],
    );
    for (k, (l, a, r)) in reports.iter().enumerate() {
        wf.push(vec![
            k.to_string(),
            l.to_string(),
            fmt_list(a),
            fmt_f64(r.probability),
            fmt_f64(r.max_overlap_amplitude),
            fmt_f64(r.max_sign_deviation),
            r.passed.to_string(),
        ]);
        if !r.passed {
            failures.push(Failure::new("wavefunction", format!("instance {k}: L = {l}, A_L = {a:?}, {r:?}")));
        }
    }

    let max_single = instances.iter().map(|i| i.single).fold(0.0, f64::max);
    let max_general = instances.iter().map(|i| i.general).fold(0.0, f64::max);
    let summary = vec![
        format!("{} matrices: max single residual {max_single:.3e}, max general residual {max_general:.3e}", instances.len()),
        format!(
            "{} wavefunction instances: {} passed",
            reports.len(),
            reports.iter().filter(|r| r.2.passed).count()
        ),
    ];
    Ok(ExperimentOutput {
        experiment: "plucker-verify",
        tables: vec![table, wf],
        failures,
        report: json!({
            "max_single_residual": max_single,
            "max_general_residual": max_general,
            "wavefunction": reports.iter().map(|r| &r.2).collect::<Vec<_>>(),
        }),
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert_eq!(parse_shape("1x2").unwrap(), (1, 2));
        assert!(parse_shape("3x3").is_err());
        assert!(parse_shape("big").is_err());
    }

    #[test]
    fn fault_is_caught() {
        let p = PluckerParams {
            matrices: 5,
            wavefunction_instances: 0,
            inject_sign_fault: true,
            ..Default::default()
        };
        assert!(!plucker_verify(&p).unwrap().passed());
        let p = PluckerParams { inject_sign_fault: false, ..p };
        assert!(plucker_verify(&p).unwrap().passed());
    }
}
