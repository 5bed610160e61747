//! Majorana correlation-matrix backend.
//!
//! Mode `j` carries the Majoranas `a_{2j} = c_j + c_j†` and
//! `a_{2j+1} = -i (c_j - c_j†)`; a Gaussian operator is described by
//! `Γ_{kl} = ⟨a_k a_l⟩ - δ_{kl}`. Physical states have `Γ = iR` with `R`
//! real antisymmetric. Products of Gaussian operators (a projector times a
//! state) are Gaussian but not Hermitian, so intermediate values use the
//! complex [`GaussianOperator`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::orbital::OrbitalMatrix;
use crate::protocol::{RungProjector, ZERO_PROBABILITY};

const ANTISYM_TOL: f64 = 1e-10;
const PHYSICAL_TOL: f64 = 1e-8;
/// Smallest singular value of `1 + Γ₁Γ₂` accepted without regularization.
pub const SINGULAR_TOL: f64 = 1e-10;
/// Mixing strengths used to regularize a singular composition.
pub const REGULARIZATION: [f64; 2] = [1e-9, 1e-8];
/// Largest change between the two regularized results that is accepted.
pub const REGULARIZATION_AGREEMENT: f64 = 1e-6;

/// Kept fermionic modes of a subsystem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubsystemSpec {
    modes: Vec<usize>,
}

impl SubsystemSpec {
    pub fn new(modes: Vec<usize>, num_modes: usize) -> Result<Self> {
        for (k, &j) in modes.iter().enumerate() {
            if j >= num_modes {
                return Err(Error::IndexOutOfRange {
                    index: j,
                    bound: num_modes,
                });
            }
            if modes[..k].contains(&j) {
                return Err(Error::Precondition(format!("mode {j} listed twice")));
            }
        }
        Ok(Self { modes })
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    /// Majorana indices `(2j, 2j+1)` of each kept mode, in order.
    pub fn majorana_indices(&self) -> Vec<usize> {
        self.modes.iter().flat_map(|&j| [2 * j, 2 * j + 1]).collect()
    }
}

/// Correlation matrix of a physical fermionic state, `Γ = iR`.
#[derive(Debug, Clone, PartialEq)]
pub struct MajoranaCorrelation {
    num_modes: usize,
    r: DMatrix<f64>,
}

/// Gaussian operator (not necessarily Hermitian) described by a complex `Γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianOperator {
    num_modes: usize,
    gamma: CMat,
}

impl MajoranaCorrelation {
    /// Wrap `R`, checking antisymmetry and `‖R‖ ≤ 1`.
    pub fn new(r: DMatrix<f64>) -> Result<Self> {
        if !r.is_square() || r.nrows() % 2 != 0 {
            return Err(Error::SizeMismatch(format!(
                "R must be square of even size, got {}x{}",
                r.nrows(),
                r.ncols()
            )));
        }
        let asym = (&r + r.transpose()).amax();
        if asym > ANTISYM_TOL {
            return Err(Error::Precondition(format!(
                "R is not antisymmetric (deviation {asym:.3e})"
            )));
        }
        if r.nrows() > 0 {
            let smax = r.clone().singular_values().max();
            if smax > 1.0 + PHYSICAL_TOL {
                return Err(Error::Precondition(format!(
                    "R is unphysical (largest singular value {smax})"
                )));
            }
        }
        Ok(Self {
            num_modes: r.nrows() / 2,
            r,
        })
    }

    /// Maximally mixed state on `num_modes` modes.
    pub fn maximally_mixed(num_modes: usize) -> Self {
        Self {
            num_modes,
            r: DMatrix::zeros(2 * num_modes, 2 * num_modes),
        }
    }

    /// From `C_{ij} = ⟨c_i† c_j⟩` of a number-conserving state:
    /// `R_xx = R_yy = 2 Im C`, `R_xy = I - 2 Re C`, `R_yx = 2 Re C - I`.
    pub fn from_complex_correlation(c: &CMat) -> Result<Self> {
        if !c.is_square() {
            return Err(Error::SizeMismatch("C must be square".into()));
        }
        let m = c.nrows();
        let mut r = DMatrix::zeros(2 * m, 2 * m);
        for i in 0..m {
            for j in 0..m {
                let z = c[(i, j)];
                let d = if i == j { 1.0 } else { 0.0 };
                r[(2 * i, 2 * j)] = 2.0 * z.im;
                r[(2 * i + 1, 2 * j + 1)] = 2.0 * z.im;
                r[(2 * i, 2 * j + 1)] = d - 2.0 * z.re;
                r[(2 * i + 1, 2 * j)] = 2.0 * z.re - d;
            }
        }
        Self::new(r)
    }

    /// Inverse of [`Self::from_complex_correlation`]; ignores any pairing part.
    pub fn complex_correlation(&self) -> CMat {
        let m = self.num_modes;
        CMat::from_fn(m, m, |i, j| {
            let d = if i == j { 1.0 } else { 0.0 };
            Complex64::new(
                0.5 * (d - self.r[(2 * i, 2 * j + 1)]),
                0.5 * self.r[(2 * i, 2 * j)],
            )
        })
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn r(&self) -> &DMatrix<f64> {
        &self.r
    }

    pub fn gamma(&self) -> CMat {
        self.r.map(|x| Complex64::new(0.0, x))
    }

    pub fn to_operator(&self) -> GaussianOperator {
        GaussianOperator {
            num_modes: self.num_modes,
            gamma: self.gamma(),
        }
    }

    /// `max |R Rᵀ - I|`; zero for pure states.
    pub fn purity_defect(&self) -> f64 {
        let n = self.r.nrows();
        (&self.r * self.r.transpose() - DMatrix::identity(n, n)).amax()
    }

    /// `R` restricted to the Majorana indices of `sub`.
    pub fn restrict(&self, sub: &SubsystemSpec) -> Result<Self> {
        let idx = sub.majorana_indices();
        if let Some(&j) = sub.modes().iter().find(|&&j| j >= self.num_modes) {
            return Err(Error::IndexOutOfRange {
                index: j,
                bound: self.num_modes,
            });
        }
        Ok(Self {
            num_modes: sub.modes().len(),
            r: DMatrix::from_fn(idx.len(), idx.len(), |a, b| self.r[(idx[a], idx[b])]),
        })
    }

    /// Block direct sum: `self` on the first modes, `lower` on the rest.
    pub fn direct_sum(&self, lower: &Self) -> Self {
        let (a, b) = (self.r.nrows(), lower.r.nrows());
        let mut r = DMatrix::zeros(a + b, a + b);
        r.view_mut((0, 0), (a, a)).copy_from(&self.r);
        r.view_mut((a, a), (b, b)).copy_from(&lower.r);
        Self {
            num_modes: self.num_modes + lower.num_modes,
            r,
        }
    }
}

/// Pure-state correlation matrix of the Slater determinant `Φ`.
pub fn gamma_from_orbitals(phi: &OrbitalMatrix) -> Result<MajoranaCorrelation> {
    let dev = phi.orthonormality_error();
    if dev > crate::orbital::ORTHONORMAL_TOL {
        return Err(Error::Precondition(format!(
            "orbital rows are not orthonormal (deviation {dev:.3e})"
        )));
    }
    MajoranaCorrelation::from_complex_correlation(&phi.correlation())
}

/// Doubled state `|ψ⟩ ⊗ |ψ̄⟩` in the bilayer-block ordering.
pub fn gamma_double(g: &MajoranaCorrelation) -> MajoranaCorrelation {
    g.direct_sum(g)
}

fn rung_block(proj: &RungProjector) -> [[Complex64; 2]; 2] {
    let u = [proj.alpha(), proj.beta()];
    let mut c = [[Complex64::default(); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            c[a][b] = u[a].conj() * u[b];
        }
    }
    c
}

/// Correlation matrix of bilayer rung states: each listed rung is pure in
/// its pair state, every other mode is maximally mixed.
pub fn rung_states_gamma(l: usize, rungs: &[(usize, RungProjector)]) -> Result<MajoranaCorrelation> {
    let mut c = CMat::zeros(2 * l, 2 * l);
    let mut mixed: Vec<usize> = (0..2 * l).collect();
    for (k, &(i, ref proj)) in rungs.iter().enumerate() {
        if i >= l {
            return Err(Error::IndexOutOfRange { index: i, bound: l });
        }
        if rungs[..k].iter().any(|(j, _)| *j == i) {
            return Err(Error::Precondition(format!("rung {i} listed twice")));
        }
        let modes = [i, l + i];
        let block = rung_block(proj);
        for a in 0..2 {
            for b in 0..2 {
                c[(modes[a], modes[b])] = block[a][b];
            }
        }
        mixed.retain(|m| !modes.contains(m));
    }
    // maximally mixed modes have C = I/2, which maps to R = 0
    for &m in &mixed {
        c[(m, m)] = linalg::c(0.5);
    }
    MajoranaCorrelation::from_complex_correlation(&c)
}

/// `Γ_M` of `∏_{i ∈ measured} |χ⟩⟨χ|_{iī} ⊗ 1`, up to normalization.
pub fn projector_gamma(l: usize, measured: &[usize], proj: &RungProjector) -> Result<MajoranaCorrelation> {
    let rungs: Vec<(usize, RungProjector)> = measured.iter().map(|&i| (i, *proj)).collect();
    rung_states_gamma(l, &rungs)
}

fn log_abs_det(m: &CMat) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let lu = m.clone().lu();
    let u = lu.u();
    (0..m.nrows()).map(|k| u[(k, k)].norm().ln()).sum()
}

impl GaussianOperator {
    pub fn new(gamma: CMat) -> Result<Self> {
        if !gamma.is_square() || gamma.nrows() % 2 != 0 {
            return Err(Error::SizeMismatch("Γ must be square of even size".into()));
        }
        Ok(Self {
            num_modes: gamma.nrows() / 2,
            gamma,
        })
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn gamma(&self) -> &CMat {
        &self.gamma
    }

    fn check_pair(&self, other: &Self) -> Result<()> {
        if self.num_modes != other.num_modes {
            return Err(Error::SizeMismatch(format!(
                "{} vs {} modes",
                self.num_modes, other.num_modes
            )));
        }
        Ok(())
    }

    fn product_unchecked(g1: &CMat, g2: &CMat) -> Option<CMat> {
        let n = g1.nrows();
        let id = CMat::identity(n, n);
        let lu = (&id + g1 * g2).lu();
        let x = lu.solve(&(&id - g1))?;
        Some(&id - (&id - g2) * x)
    }

    fn min_singular(m: &CMat) -> f64 {
        if m.nrows() == 0 {
            return f64::INFINITY;
        }
        m.clone().singular_values().min()
    }

    /// Correlation matrix of the normalized product `ρ₁ρ₂`:
    /// `1 - (1-Γ₂)(1+Γ₁Γ₂)⁻¹(1-Γ₁)`.
    ///
    /// If `1 + Γ₁Γ₂` has a singular value below [`SINGULAR_TOL`], both factors
    /// are mixed by `(1 - δ)` for each δ in [`REGULARIZATION`]; the weaker
    /// mixing is returned when the two results agree within
    /// [`REGULARIZATION_AGREEMENT`].
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(self.compose_report(other)?.0)
    }

    /// [`Self::compose`], also reporting whether regularization was needed.
    pub fn compose_report(&self, other: &Self) -> Result<(Self, bool)> {
        self.check_pair(other)?;
        let n = self.gamma.nrows();
        let sum = CMat::identity(n, n) + &self.gamma * &other.gamma;
        let smin = Self::min_singular(&sum);
        if smin >= SINGULAR_TOL {
            if let Some(g) = Self::product_unchecked(&self.gamma, &other.gamma) {
                let op = Self {
                    num_modes: self.num_modes,
                    gamma: g,
                };
                return Ok((op, false));
            }
        }
        let mut results = Vec::with_capacity(REGULARIZATION.len());
        let mut log_overlaps = Vec::with_capacity(REGULARIZATION.len());
        for d in REGULARIZATION {
            let s = linalg::c(1.0 - d);
            let (a, b) = (&self.gamma * s, &other.gamma * s);
            let g = Self::product_unchecked(&a, &b).ok_or(Error::CompositionSingular { min_singular: smin })?;
            log_overlaps.push(log_abs_det(&(CMat::identity(n, n) + &a * &b)));
            results.push(g);
        }
        // a vanishing product shows up as an overlap that grows with the mixing
        if log_overlaps[1] - log_overlaps[0] > std::f64::consts::LN_2 {
            return Err(Error::CompositionSingular { min_singular: smin });
        }
        let change = linalg::max_abs(&(&results[1] - &results[0]));
        if !change.is_finite() || change >= REGULARIZATION_AGREEMENT {
            return Err(Error::CompositionSingular { min_singular: smin });
        }
        let op = Self {
            num_modes: self.num_modes,
            gamma: results.swap_remove(0),
        };
        Ok((op, true))
    }

    /// `log Tr(ρ₁ρ₂) = -M log 2 + ½ log|det(1 + Γ₁Γ₂)|` for unit-trace operators.
    pub fn log_overlap(&self, other: &Self) -> Result<f64> {
        self.check_pair(other)?;
        let n = self.gamma.nrows();
        let sum = CMat::identity(n, n) + &self.gamma * &other.gamma;
        Ok(-(self.num_modes as f64) * std::f64::consts::LN_2 + 0.5 * log_abs_det(&sum))
    }

    /// Hermitian part as a physical correlation matrix; fails when `Γ` is not
    /// `i` times a real antisymmetric matrix within 1e-8.
    pub fn to_correlation(&self) -> Result<MajoranaCorrelation> {
        let r_complex = self.gamma.map(|z| z * -Complex64::i());
        let imag = r_complex.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if imag > PHYSICAL_TOL {
            return Err(Error::Precondition(format!(
                "operator is not Hermitian (imaginary part of R {imag:.3e})"
            )));
        }
        let r = r_complex.map(|z| z.re);
        // symmetrize away roundoff before validating
        let r = (&r - r.transpose()) * 0.5;
        MajoranaCorrelation::new(r)
    }
}

/// `Tr(ρ₁ρ₂)`; the fidelity for pure states.
pub fn overlap(g1: &MajoranaCorrelation, g2: &MajoranaCorrelation) -> Result<f64> {
    Ok(g1.to_operator().log_overlap(&g2.to_operator())?.exp())
}

/// Normalized `ρ₁ρ₂` of two physical states.
pub fn compose(g1: &MajoranaCorrelation, g2: &MajoranaCorrelation) -> Result<GaussianOperator> {
    g1.to_operator().compose(&g2.to_operator())
}

/// Outcome of projecting a state with `Γ_M`.
#[derive(Debug, Clone)]
pub struct GaussianMeasurement {
    /// `log Tr(ρ_M ρ₀)` with `ρ_M` the unnormalized projector.
    pub log_probability: f64,
    /// `None` for outcomes below [`ZERO_PROBABILITY`].
    pub post: Option<MajoranaCorrelation>,
}

/// `log` of the outcome probability for projecting `n_measured` rungs of `g0`
/// onto the pure rung states encoded in `gm`.
pub fn log_projection_probability(
    g0: &MajoranaCorrelation,
    gm: &MajoranaCorrelation,
    n_measured: usize,
) -> Result<f64> {
    // ρ_M = Tr(ρ_M) ρ̂_M with Tr(ρ_M) = 2^{M - 2 n_m}
    let m = g0.num_modes() as f64;
    let trace = (m - 2.0 * n_measured as f64) * std::f64::consts::LN_2;
    Ok(trace + gm.to_operator().log_overlap(&g0.to_operator())?)
}

/// `Γ_post = (Γ_M × Γ₀) × Γ_M`.
pub fn post_measurement_gamma(g0: &MajoranaCorrelation, gm: &MajoranaCorrelation) -> Result<MajoranaCorrelation> {
    Ok(post_measurement_gamma_report(g0, gm)?.0)
}

/// [`post_measurement_gamma`], also reporting whether either composition
/// went through the regularization path.
pub fn post_measurement_gamma_report(
    g0: &MajoranaCorrelation,
    gm: &MajoranaCorrelation,
) -> Result<(MajoranaCorrelation, bool)> {
    let op_m = gm.to_operator();
    let (first, r1) = op_m.compose_report(&g0.to_operator())?;
    let (second, r2) = first.compose_report(&op_m)?;
    Ok((second.to_correlation()?, r1 || r2))
}

/// Probability and post-state of projecting `n_measured` rungs.
pub fn measure(g0: &MajoranaCorrelation, gm: &MajoranaCorrelation, n_measured: usize) -> Result<GaussianMeasurement> {
    let log_probability = log_projection_probability(g0, gm, n_measured)?;
    if log_probability.exp() < ZERO_PROBABILITY {
        return Ok(GaussianMeasurement {
            log_probability,
            post: None,
        });
    }
    Ok(GaussianMeasurement {
        log_probability,
        post: Some(post_measurement_gamma(g0, gm)?),
    })
}

/// Von Neumann entropy (nats) of the subsystem, `Σ_k h((1+ν_k)/2)` over the
/// positive eigenvalues `ν_k` of `iR` restricted to the subsystem.
pub fn entropy_from_gamma(g: &MajoranaCorrelation, sub: &SubsystemSpec) -> Result<f64> {
    let r = g.restrict(sub)?;
    let ir = r.r.map(|x| Complex64::new(0.0, x));
    // eigenvalues come in ± pairs, so half the total over all of them
    let s: f64 = linalg::hermitian_eigenvalues(&ir)
        .into_iter()
        .map(|nu| linalg::binary_entropy(0.5 * (1.0 + nu.clamp(-1.0, 1.0))))
        .sum();
    Ok(0.5 * s)
}
