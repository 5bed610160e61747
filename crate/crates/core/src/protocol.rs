//! Measurement protocols on the doubled state, on either backend.
//!
//! The measured rung set is `A_L`; its complement in the upper layer is
//! `A_R`. After a uniform single-occupancy outcome `|χ⟩` on every rung of a
//! half-system `A_L`, each unmeasured rung is left in the orthogonal
//! single-occupancy state `|χ^⊥⟩`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{self, FockState, PairState};
use crate::gaussian::{self, MajoranaCorrelation, SubsystemSpec};
use crate::linalg;
use crate::models::{self, ChainSpec};
use crate::orbital::OrbitalMatrix;
use crate::slater;

/// Outcomes below this probability are treated as impossible. An outcome
/// that vanishes identically evaluates to roundoff of order 1e-32, while a
/// genuine half-system outcome of the 12-site critical chain is about 5e-26.
pub const ZERO_PROBABILITY: f64 = 1e-30;
/// Outcomes below this probability count as vanishing in the reported checks.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-12;
const PROJECTOR_NORM_TOL: f64 = 1e-12;

/// Single-occupancy rung state `(α c_i† + β c_ī†)|vac⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RungProjector {
    alpha: Complex64,
    beta: Complex64,
}

impl RungProjector {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        if (n - 1.0).abs() > PROJECTOR_NORM_TOL {
            return Err(Error::Precondition(format!(
                "rung state is not normalized (|α|² + |β|² = {n})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    fn real(alpha: f64, beta: f64) -> Self {
        Self {
            alpha: linalg::c(alpha),
            beta: linalg::c(beta),
        }
    }

    pub fn bell_plus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::real(s, s)
    }

    pub fn bell_minus() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::real(s, -s)
    }

    fn check_eps(eps: f64) -> Result<()> {
        if !(-1.0..=1.0).contains(&eps) {
            return Err(Error::Domain(format!("ε must lie in [-1, 1], got {eps}")));
        }
        Ok(())
    }

    /// `(√(1+ε) c_i† + √(1-ε) c_ī†)|vac⟩ / √2`.
    pub fn epsilon_plus(eps: f64) -> Result<Self> {
        Self::check_eps(eps)?;
        Ok(Self::real(
            (0.5 * (1.0 + eps)).sqrt(),
            (0.5 * (1.0 - eps)).sqrt(),
        ))
    }

    /// `(√(1-ε) c_i† - √(1+ε) c_ī†)|vac⟩ / √2`.
    pub fn epsilon_minus(eps: f64) -> Result<Self> {
        Self::check_eps(eps)?;
        Ok(Self::real(
            (0.5 * (1.0 - eps)).sqrt(),
            -(0.5 * (1.0 + eps)).sqrt(),
        ))
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn pair_state(&self) -> PairState {
        PairState::single(self.alpha, self.beta)
    }

    /// The orthogonal single-occupancy state `(-β*, α*)`.
    pub fn complement(&self) -> Self {
        Self {
            alpha: -self.beta.conj(),
            beta: self.alpha.conj(),
        }
    }

    /// Entanglement between the two sites of the rung state, in nats.
    pub fn rung_entropy(&self) -> f64 {
        linalg::binary_entropy(self.alpha.norm_sqr())
    }

    fn is_balanced(&self) -> bool {
        (self.alpha.norm_sqr() - 0.5).abs() < PROJECTOR_NORM_TOL
    }
}

/// `S_rung^ε = h((1+ε)/2)` in nats.
pub fn rung_entropy_epsilon(eps: f64) -> f64 {
    linalg::binary_entropy(0.5 * (1.0 + eps))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Oracle,
    Gaussian,
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Oracle => "oracle",
            Backend::Gaussian => "gaussian",
        }
    }
}

#[derive(Debug, Clone)]
pub enum PostState {
    Fock(FockState),
    Gaussian(MajoranaCorrelation),
}

/// Outcome of one post-selected measurement.
#[derive(Debug, Clone)]
pub struct ProtocolResult {
    pub backend: Backend,
    pub measured: Vec<usize>,
    pub probability: f64,
    /// Natural log of `probability`, accurate where `probability` underflows.
    pub log_probability: f64,
    /// `None` for zero-probability outcomes.
    pub post: Option<PostState>,
    /// Entropies in nats keyed by cut name; `"A_R"` is the unmeasured
    /// upper-layer region against everything else.
    pub entropies: BTreeMap<String, f64>,
    /// Fidelity to the ideal rung product, when the measured set is a half system.
    pub fidelity_to_ideal: Option<f64>,
}

impl ProtocolResult {
    pub fn is_zero(&self) -> bool {
        self.post.is_none()
    }

    pub fn entropy_ar(&self) -> Option<f64> {
        self.entropies.get("A_R").copied()
    }
}

fn validate_rungs(l: usize, measured: &[usize]) -> Result<()> {
    for (k, &i) in measured.iter().enumerate() {
        if i >= l {
            return Err(Error::IndexOutOfRange { index: i, bound: l });
        }
        if measured[..k].contains(&i) {
            return Err(Error::Precondition(format!("rung {i} listed twice")));
        }
    }
    Ok(())
}

fn unmeasured(l: usize, measured: &[usize]) -> Vec<usize> {
    (0..l).filter(|i| !measured.contains(i)).collect()
}

/// Rung assignment of the ideal post-state: `proj` on the measured rungs and
/// its complement elsewhere.
fn ideal_assignment(l: usize, measured: &[usize], proj: &RungProjector) -> Vec<(usize, RungProjector)> {
    (0..l)
        .map(|i| {
            if measured.contains(&i) {
                (i, *proj)
            } else {
                (i, proj.complement())
            }
        })
        .collect()
}

/// `∏_i (α_i c_i† + β_i c_ī†)|vac⟩` over all rungs in ascending order, with
/// `proj_measured` on `measured` and `proj_complement` on the other rungs.
pub fn ideal_bell_product(
    l: usize,
    measured: &[usize],
    proj_measured: &RungProjector,
    proj_complement: &RungProjector,
) -> Result<FockState> {
    validate_rungs(l, measured)?;
    let mut psi = FockState::vacuum(2 * l)?;
    for i in (0..l).rev() {
        let p = if measured.contains(&i) {
            proj_measured
        } else {
            proj_complement
        };
        let up = psi.create(i)?;
        let down = psi.create(l + i)?;
        let amps: Vec<Complex64> = up
            .amplitudes()
            .iter()
            .zip(down.amplitudes())
            .map(|(u, d)| p.alpha * u + p.beta * d)
            .collect();
        psi = FockState::new(2 * l, amps)?;
    }
    Ok(psi)
}

/// Measure `measured` rungs of `upper ⊗ lower` with the uniform outcome `proj`.
pub fn run_measurement(
    upper: &OrbitalMatrix,
    lower: &OrbitalMatrix,
    measured: &[usize],
    proj: &RungProjector,
    backend: Backend,
) -> Result<ProtocolResult> {
    let l = upper.l();
    if lower.l() != l {
        return Err(Error::SizeMismatch(format!(
            "layers have {l} and {} sites",
            lower.l()
        )));
    }
    validate_rungs(l, measured)?;
    match backend {
        Backend::Oracle => run_oracle(upper, lower, measured, proj),
        Backend::Gaussian => run_gaussian(upper, lower, measured, proj),
    }
}

/// Uniform measurement on two identical copies of `phi`.
pub fn run_uniform_measurement(
    phi: &OrbitalMatrix,
    measured: &[usize],
    proj: &RungProjector,
    backend: Backend,
) -> Result<ProtocolResult> {
    run_measurement(phi, phi, measured, proj, backend)
}

fn run_oracle(
    upper: &OrbitalMatrix,
    lower: &OrbitalMatrix,
    measured: &[usize],
    proj: &RungProjector,
) -> Result<ProtocolResult> {
    let l = upper.l();
    let mut psi = fock::tensor_product(&fock::build_slater_state(upper)?, &fock::build_slater_state(lower)?)?;
    let mut probability = 1.0;
    for &i in measured {
        let (img, p) = fock::apply_rung_projector(&psi, i, proj)?;
        probability *= p;
        if probability < ZERO_PROBABILITY {
            return Ok(zero_result(Backend::Oracle, measured, probability));
        }
        psi = img.normalized()?;
    }
    let rest = unmeasured(l, measured);
    let mut entropies = BTreeMap::new();
    if !rest.is_empty() {
        entropies.insert("A_R".to_string(), fock::entanglement_entropy(&psi, &rest)?);
    }
    let fidelity_to_ideal = if 2 * measured.len() == l {
        let ideal = ideal_bell_product(l, measured, proj, &proj.complement())?;
        Some(fock::fidelity(&psi, &ideal)?)
    } else {
        None
    };
    Ok(ProtocolResult {
        backend: Backend::Oracle,
        measured: measured.to_vec(),
        probability,
        log_probability: probability.ln(),
        post: Some(PostState::Fock(psi)),
        entropies,
        fidelity_to_ideal,
    })
}

fn run_gaussian(
    upper: &OrbitalMatrix,
    lower: &OrbitalMatrix,
    measured: &[usize],
    proj: &RungProjector,
) -> Result<ProtocolResult> {
    let l = upper.l();
    // the post-state is again a Slater determinant; eliminating on the
    // stacked orbitals keeps full relative precision where the trace formula
    // and the composition of Γ's lose it as eps/P on tiny outcomes
    let projection = slater::project_rungs(upper, lower, measured, proj)?;
    // identical copies measured on a half system with a balanced projector:
    // the probability is the product of two Slater minors
    let log_probability = if upper == lower && 2 * measured.len() == l && proj.is_balanced() {
        slater::log_postselect_probability(upper, measured)?
    } else {
        projection.log_probability
    };
    let probability = log_probability.exp();
    if probability < ZERO_PROBABILITY {
        return Ok(zero_result(Backend::Gaussian, measured, probability));
    }
    let Some(orbitals) = projection.post else {
        return Ok(zero_result(Backend::Gaussian, measured, probability));
    };
    let post = gaussian::gamma_from_orbitals(&orbitals)?;
    let rest = unmeasured(l, measured);
    let mut entropies = BTreeMap::new();
    if !rest.is_empty() {
        let sub = SubsystemSpec::new(rest, 2 * l)?;
        entropies.insert("A_R".to_string(), gaussian::entropy_from_gamma(&post, &sub)?);
    }
    let fidelity_to_ideal = if 2 * measured.len() == l {
        let ideal = gaussian::rung_states_gamma(l, &ideal_assignment(l, measured, proj))?;
        Some(gaussian::overlap(&post, &ideal)?)
    } else {
        None
    };
    Ok(ProtocolResult {
        backend: Backend::Gaussian,
        measured: measured.to_vec(),
        probability,
        log_probability,
        post: Some(PostState::Gaussian(post)),
        entropies,
        fidelity_to_ideal,
    })
}

fn zero_result(backend: Backend, measured: &[usize], probability: f64) -> ProtocolResult {
    ProtocolResult {
        backend,
        measured: measured.to_vec(),
        probability,
        log_probability: probability.ln(),
        post: None,
        entropies: BTreeMap::new(),
        fidelity_to_ideal: None,
    }
}

/// Correlation matrix of the ideal post-state for a half-system outcome.
pub fn ideal_gamma(l: usize, measured: &[usize], proj: &RungProjector) -> Result<MajoranaCorrelation> {
    validate_rungs(l, measured)?;
    gaussian::rung_states_gamma(l, &ideal_assignment(l, measured, proj))
}

#[derive(Debug, Clone, Serialize)]
pub struct FillingCase {
    pub n: usize,
    pub seed: u64,
    pub probability: f64,
    pub half_filled: bool,
    pub passed: bool,
}

/// Sweep the particle number at fixed `l`: every `N ≠ L/2` must give a
/// vanishing uniform `|+⟩` outcome probability.
pub fn check_filling_selection(l: usize, measured: &[usize], seed: u64, backend: Backend) -> Result<Vec<FillingCase>> {
    if 2 * measured.len() != l {
        return Err(Error::Precondition(format!(
            "measured set must hold L/2 = {} rungs",
            l / 2
        )));
    }
    (0..=l)
        .map(|n| {
            let case_seed = seed.wrapping_add(n as u64);
            let phi = models::random_slater(l, n, case_seed)?;
            let r = run_uniform_measurement(&phi, measured, &RungProjector::bell_plus(), backend)?;
            let half_filled = 2 * n == l;
            Ok(FillingCase {
                n,
                seed: case_seed,
                probability: r.probability,
                half_filled,
                passed: half_filled || r.probability < NEGLIGIBLE_PROBABILITY,
            })
        })
        .collect()
}

/// Random measured-rung subset of size `n_m`, sorted, determined by `seed`.
pub fn random_rung_subset(l: usize, n_m: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut v = rand::seq::index::sample(&mut rng, l, n_m).into_vec();
    v.sort_unstable();
    v
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropySample {
    pub trial: usize,
    pub measured: Vec<usize>,
    pub probability: f64,
    pub entropy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartialMeasurement {
    pub samples: Vec<EntropySample>,
    /// Trials dropped for zero outcome probability.
    pub excluded: usize,
    /// `n_m · S_rung`.
    pub predicted: f64,
}

/// `S(A_R)` after measuring `n_m` random rungs of the doubled `phi`, one
/// random subset per trial. Trials run in parallel; samples are ordered by
/// trial index.
pub fn partial_measurement_entropy(
    phi: &OrbitalMatrix,
    n_m: usize,
    proj: &RungProjector,
    trials: usize,
    seed: u64,
    backend: Backend,
) -> Result<PartialMeasurement> {
    let l = phi.l();
    if 2 * n_m > l {
        return Err(Error::Precondition(format!("n_m = {n_m} exceeds L/2 = {}", l / 2)));
    }
    let results: Vec<Result<Option<EntropySample>>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let measured = random_rung_subset(l, n_m, seed.wrapping_add(trial as u64));
            let r = run_uniform_measurement(phi, &measured, proj, backend)?;
            Ok(r.entropy_ar().filter(|_| !r.is_zero()).map(|entropy| EntropySample {
                trial,
                measured,
                probability: r.probability,
                entropy,
            }))
        })
        .collect();
    let mut samples = Vec::new();
    let mut excluded = 0;
    for r in results {
        match r? {
            Some(s) => samples.push(s),
            None => excluded += 1,
        }
    }
    Ok(PartialMeasurement {
        samples,
        excluded,
        predicted: n_m as f64 * proj.rung_entropy(),
    })
}

/// Half-system `|+⟩` measurement of the chain ground state against a copy
/// whose staggered mass is shifted by `dm`. The fidelity is to the ideal
/// `|−⟩` product on the unmeasured rungs.
pub fn imperfect_copy_run(spec: &ChainSpec, dm: f64, backend: Backend) -> Result<ProtocolResult> {
    if spec.n * 2 != spec.l {
        return Err(Error::Precondition("imperfect copies require half filling".into()));
    }
    let upper = models::ground_state_orbitals(spec)?;
    let lower = models::ground_state_orbitals(&spec.with_mass_offset(dm))?;
    let measured: Vec<usize> = (0..spec.l / 2).collect();
    run_measurement(&upper, &lower, &measured, &RungProjector::bell_plus(), backend)
}
