//! Determinant side of the protocol: Slater minors, the post-selection
//! probability `|Δ_{A_L} Δ_{A_R}|²`, the entanglement spectrum of a
//! half-system cut and the Plücker relations among minors.
//!
//! Every permutation sign in this module is the inversion parity of a
//! concatenated index list ([`crate::linalg::sort_sign`]).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{self, ModeOrdering};
use crate::linalg::{self, CMat};
use crate::orbital::OrbitalMatrix;
use crate::protocol::RungProjector;

const HERMITIAN_TOL: f64 = 1e-9;
const ZERO_PROBABILITY: f64 = 1e-12;

fn check_indices(list: &[usize], bound: usize, ascending: bool) -> Result<()> {
    for (k, &i) in list.iter().enumerate() {
        if i >= bound {
            return Err(Error::IndexOutOfRange { index: i, bound });
        }
        if ascending && k > 0 && list[k - 1] >= i {
            return Err(Error::Precondition(format!(
                "indices must be strictly ascending: {list:?}"
            )));
        }
    }
    Ok(())
}

/// Determinant of `m[rows, cols]` for strictly ascending selections; the
/// empty selection gives 1.
pub fn minor(phi: &OrbitalMatrix, rows: &[usize], cols: &[usize]) -> Result<Complex64> {
    if rows.len() != cols.len() {
        return Err(Error::SizeMismatch(format!(
            "{} rows vs {} columns",
            rows.len(),
            cols.len()
        )));
    }
    check_indices(rows, phi.n(), true)?;
    check_indices(cols, phi.l(), true)?;
    let m = phi.matrix();
    let sub = DMatrix::from_fn(rows.len(), cols.len(), |a, b| m[(rows[a], cols[b])]);
    Ok(linalg::det(&sub))
}

/// Determinant of the square matrix formed by `cols` of `m` in the given
/// order. Repeated columns give exactly zero.
pub fn ordered_minor(m: &CMat, cols: &[usize]) -> Complex64 {
    for (k, c) in cols.iter().enumerate() {
        if cols[k + 1..].contains(c) {
            return Complex64::default();
        }
    }
    let sub = DMatrix::from_fn(m.nrows(), cols.len(), |q, k| m[(q, cols[k])]);
    linalg::det(&sub)
}

/// `Δ_A = det Φ([N], A)` for an occupation set in any order.
fn slater_minor(phi: &OrbitalMatrix, cols: &[usize]) -> Complex64 {
    ordered_minor(phi.matrix(), cols)
}

fn complement(l: usize, set: &[usize]) -> Vec<usize> {
    (0..l).filter(|i| !set.contains(i)).collect()
}

fn half_cut(phi: &OrbitalMatrix, a_left: &[usize]) -> Result<Vec<usize>> {
    let l = phi.l();
    if l % 2 != 0 {
        return Err(Error::Precondition(format!("odd site count {l}")));
    }
    if a_left.len() != l / 2 {
        return Err(Error::Precondition(format!(
            "measured set must hold L/2 = {} sites, got {}",
            l / 2,
            a_left.len()
        )));
    }
    let mut sorted = a_left.to_vec();
    sorted.sort_unstable();
    check_indices(&sorted, l, true)?;
    Ok(complement(l, &sorted))
}

/// Outcome probability of the uniform Bell result on a half-system cut.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Postselection {
    pub probability: f64,
    /// `false` when `N ≠ L/2`, where the probability vanishes identically.
    pub half_filled: bool,
}

/// `P = |Δ_{A_L} Δ_{A_R}|²`.
pub fn postselect_probability(phi: &OrbitalMatrix, a_left: &[usize]) -> Result<Postselection> {
    let a_right = half_cut(phi, a_left)?;
    if phi.n() != a_left.len() {
        return Ok(Postselection {
            probability: 0.0,
            half_filled: false,
        });
    }
    let mut a = a_left.to_vec();
    a.sort_unstable();
    let p = (slater_minor(phi, &a) * slater_minor(phi, &a_right)).norm_sqr();
    Ok(Postselection {
        probability: p,
        half_filled: true,
    })
}

fn log_abs_det(m: &CMat) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let lu = m.clone().lu();
    let u = lu.u();
    (0..m.nrows()).map(|k| u[(k, k)].norm().ln()).sum()
}

/// `log P` from the two minors, computed from LU pivots so it stays finite
/// far below the `f64` underflow of `P` itself. Not-half-filled states give `-∞`.
pub fn log_postselect_probability(phi: &OrbitalMatrix, a_left: &[usize]) -> Result<f64> {
    let a_right = half_cut(phi, a_left)?;
    if phi.n() != a_left.len() {
        return Ok(f64::NEG_INFINITY);
    }
    let mut a = a_left.to_vec();
    a.sort_unstable();
    let left = phi.columns(&a);
    let right = phi.columns(&a_right);
    Ok(2.0 * (log_abs_det(&left) + log_abs_det(&right)))
}

/// `C(A) = Φ(A)† Φ(A)`, indexed by the sites of `a` in the given order.
pub fn correlation_submatrix(phi: &OrbitalMatrix, a: &[usize]) -> Result<CMat> {
    if a.is_empty() {
        return Err(Error::Precondition("empty site set".into()));
    }
    check_indices(a, phi.l(), false)?;
    let sub = phi.columns(a);
    Ok(sub.adjoint() * sub)
}

/// Correlation eigenvalues `ξ` and entanglement energies `ε = log((1-ξ)/ξ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntanglementSpectrum {
    pub xi: Vec<f64>,
    pub eps: Vec<f64>,
}

impl EntanglementSpectrum {
    pub fn from_xi(mut xi: Vec<f64>) -> Self {
        xi.sort_by(|a, b| a.total_cmp(b));
        let eps = xi
            .iter()
            .map(|&x| {
                if x <= 0.0 {
                    f64::INFINITY
                } else if x >= 1.0 {
                    f64::NEG_INFINITY
                } else {
                    ((1.0 - x) / x).ln()
                }
            })
            .collect();
        Self { xi, eps }
    }

    /// Finite positive entanglement energies, ascending.
    pub fn positive_levels(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .eps
            .iter()
            .copied()
            .filter(|e| e.is_finite() && *e > 0.0)
            .collect();
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }
}

/// Spectrum of a Hermitian correlation matrix; eigenvalues are clamped to [0, 1].
pub fn entanglement_spectrum(c: &CMat) -> Result<EntanglementSpectrum> {
    if !c.is_square() {
        return Err(Error::SizeMismatch("correlation matrix must be square".into()));
    }
    let asym = linalg::max_abs(&(c - c.adjoint()));
    if asym > HERMITIAN_TOL {
        return Err(Error::Precondition(format!(
            "correlation matrix is not Hermitian (deviation {asym:.3e})"
        )));
    }
    let xi = linalg::hermitian_eigenvalues(c)
        .into_iter()
        .map(|x| x.clamp(0.0, 1.0))
        .collect();
    Ok(EntanglementSpectrum::from_xi(xi))
}

/// `log(2 cosh(ε/2))` in overflow-free form.
pub fn log_two_cosh_half(eps: f64) -> f64 {
    let a = eps.abs();
    if a.is_infinite() {
        return f64::INFINITY;
    }
    0.5 * a + (-a).exp().ln_1p()
}

/// `log P = -2 Σ log(2 cosh(ε_i/2))`; any infinite level gives `-∞`.
pub fn log_probability_from_spectrum(spec: &EntanglementSpectrum) -> f64 {
    -2.0 * spec.eps.iter().map(|&e| log_two_cosh_half(e)).sum::<f64>()
}

/// `|sum| / max|term|`, or `|sum|` when every term is below 1e-300.
pub fn relative_residual(terms: &[Complex64]) -> f64 {
    let sum: Complex64 = terms.iter().sum();
    let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    if scale < 1e-300 {
        sum.norm()
    } else {
        sum.norm() / scale
    }
}

fn check_plucker_shape(m: &CMat, sets: &[(&[usize], usize, &str)]) -> Result<()> {
    for &(set, size, name) in sets {
        if set.len() != size {
            return Err(Error::SizeMismatch(format!(
                "{name} must hold {size} indices, got {}",
                set.len()
            )));
        }
        check_indices(set, m.ncols(), false)?;
    }
    Ok(())
}

/// Terms `(-1)^l det[M_a, M_{b_l}] det[M_{b \ b_l}]` of the
/// single-column-exchange Plücker relation; they sum to zero.
pub fn plucker_single_terms(m: &CMat, a: &[usize], b: &[usize]) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    if n == 0 {
        return Err(Error::Precondition("matrix has no rows".into()));
    }
    check_plucker_shape(m, &[(a, n - 1, "a"), (b, n + 1, "b")])?;
    Ok((0..b.len())
        .map(|l| {
            let mut left = a.to_vec();
            left.push(b[l]);
            let right: Vec<usize> = b.iter().enumerate().filter(|&(k, _)| k != l).map(|(_, &j)| j).collect();
            let s = if l % 2 == 0 { 1.0 } else { -1.0 };
            ordered_minor(m, &left) * ordered_minor(m, &right) * s
        })
        .collect())
}

/// Relative residual of the single-column-exchange relation.
pub fn plucker_single_residual(m: &CMat, a: &[usize], b: &[usize]) -> Result<f64> {
    Ok(relative_residual(&plucker_single_terms(m, a, b)?))
}

/// Terms `sgn(C ∪ D) det[M_e, M_C] det[M_D, M_f]` over `C ⊂ s` with
/// `|C| = N - k` and `D = s \ C`; they sum to zero.
pub fn plucker_general_terms(m: &CMat, e: &[usize], f: &[usize], s: &[usize]) -> Result<Vec<Complex64>> {
    let n = m.nrows();
    let k = e.len();
    if n == 0 || k >= n {
        return Err(Error::SizeMismatch(format!(
            "e must hold fewer than N = {n} indices, got {k}"
        )));
    }
    check_plucker_shape(m, &[(f, n - k - 1, "f"), (s, n + 1, "s")])?;
    check_indices(e, m.ncols(), false)?;
    Ok(linalg::combinations(s.len(), n - k)
        .into_iter()
        .map(|pick| {
            let c: Vec<usize> = pick.iter().map(|&p| s[p]).collect();
            let d: Vec<usize> = (0..s.len()).filter(|p| !pick.contains(p)).map(|p| s[p]).collect();
            let sign = linalg::sort_sign(&[c.as_slice(), d.as_slice()].concat());
            let left = [e, c.as_slice()].concat();
            let right = [d.as_slice(), f].concat();
            ordered_minor(m, &left) * ordered_minor(m, &right) * sign
        })
        .collect())
}

/// Relative residual of the general relation.
pub fn plucker_general_residual(m: &CMat, e: &[usize], f: &[usize], s: &[usize]) -> Result<f64> {
    Ok(relative_residual(&plucker_general_terms(m, e, f, s)?))
}

/// Outcome of projecting rungs of a doubled Slater determinant.
#[derive(Debug, Clone)]
pub struct RungProjection {
    /// Natural log of the outcome probability; `-∞` for an exact zero.
    pub log_probability: f64,
    /// Orbitals of the normalized post-measurement state on all `2L` modes:
    /// one row per measured rung state plus the surviving orbitals.
    pub post: Option<OrbitalMatrix>,
}

/// Project every rung in `measured` of `upper ⊗ lower` onto the rung state
/// of `proj` by elimination on the orbital rows.
///
/// The rung projector is `n_χ (1 - n_χ⊥)` with `χ = α e_i + β e_ī`. On a
/// Slater determinant, `1 - n_χ⊥` removes the `χ⊥` component of every row;
/// `n_χ` then keeps one pivot row's `χ` component after the other rows have
/// been cleared of it. Rounding errors are set by the amplitudes rather than
/// by the probability, which is what keeps outcomes far below 1e-20 usable.
pub fn project_rungs(
    upper: &OrbitalMatrix,
    lower: &OrbitalMatrix,
    measured: &[usize],
    proj: &RungProjector,
) -> Result<RungProjection> {
    let l = upper.l();
    if lower.l() != l {
        return Err(Error::SizeMismatch(format!("layers have {l} and {} sites", lower.l())));
    }
    check_indices(measured, l, false)?;
    if (1..measured.len()).any(|k| measured[..k].contains(&measured[k])) {
        return Err(Error::Precondition(format!("repeated rung in {measured:?}")));
    }
    let (nu, nl) = (upper.n(), lower.n());
    let mut rows = CMat::zeros(nu + nl, 2 * l);
    rows.view_mut((0, 0), (nu, l)).copy_from(upper.matrix());
    rows.view_mut((nu, l), (nl, l)).copy_from(lower.matrix());
    let zero = RungProjection {
        log_probability: f64::NEG_INFINITY,
        post: None,
    };
    let (alpha, beta) = (proj.alpha(), proj.beta());
    let mut live: Vec<usize> = (0..nu + nl).collect();
    let mut frozen = Vec::with_capacity(measured.len());
    let mut log_amplitude = 0.0;
    for &i in measured {
        let j = l + i;
        let a: Vec<Complex64> = live
            .iter()
            .map(|&r| alpha.conj() * rows[(r, i)] + beta.conj() * rows[(r, j)])
            .collect();
        let Some(k) = (0..a.len()).max_by(|&x, &y| a[x].norm().total_cmp(&a[y].norm())) else {
            return Ok(zero);
        };
        if a[k].norm() == 0.0 {
            return Ok(zero);
        }
        let p = live[k];
        let pivot = rows.row(p).clone_owned();
        for (idx, &r) in live.iter().enumerate() {
            if r == p {
                continue;
            }
            let f = a[idx] / a[k];
            let mut row = rows.row_mut(r);
            row -= &pivot * f;
            row[i] = Complex64::default();
            row[j] = Complex64::default();
        }
        rows.row_mut(p).fill(Complex64::default());
        rows[(p, i)] = alpha;
        rows[(p, j)] = beta;
        log_amplitude += a[k].norm().ln();
        live.remove(k);
        frozen.push(p);
    }
    let mut post = CMat::zeros(nu + nl, 2 * l);
    for (q, &p) in frozen.iter().enumerate() {
        post.set_row(q, &rows.row(p));
    }
    if !live.is_empty() {
        // the surviving rows vanish on measured modes; orthonormalize them
        // on the free modes only, so round-off cannot leak into measured rungs
        let free: Vec<usize> = (0..2 * l).filter(|&c| !measured.contains(&(c % l))).collect();
        if live.len() > free.len() {
            return Ok(zero);
        }
        let w = CMat::from_fn(free.len(), live.len(), |c, q| rows[(live[q], free[c])]);
        let qr = w.qr();
        let r = qr.r();
        for k in 0..live.len() {
            let d = r[(k, k)].norm();
            if d == 0.0 {
                return Ok(zero);
            }
            log_amplitude += d.ln();
        }
        let q = qr.q();
        for k in 0..live.len() {
            for (c, &m) in free.iter().enumerate() {
                post[(frozen.len() + k, m)] = q[(c, k)];
            }
        }
    }
    Ok(RungProjection {
        log_probability: 2.0 * log_amplitude,
        post: Some(OrbitalMatrix::new(post)?),
    })
}

/// Amplitude structure of the post-measurement state after uniform `|+⟩`
/// outcomes on `a_left`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub probability: f64,
    /// Outcome has zero probability, so no post-state exists.
    pub trivial: bool,
    /// Largest remaining amplitude with a doubly occupied unmeasured rung.
    pub max_overlap_amplitude: f64,
    /// Largest spread of the sign-corrected singly occupied amplitudes.
    pub max_sign_deviation: f64,
    pub passed: bool,
}

/// Check on the oracle that the remaining amplitudes vanish whenever an
/// unmeasured rung is doubly occupied, and otherwise equal a common value
/// times `(-1)^{|B_R|}` once the layer-ordered string is rewritten rung by rung.
pub fn theorem1_wavefunction_checks(phi: &OrbitalMatrix, a_left: &[usize]) -> Result<Theorem1Report> {
    let l = phi.l();
    if l > 8 {
        return Err(Error::Capacity { modes: 2 * l, max: 16 });
    }
    let rest = half_cut(phi, a_left)?;
    if phi.n() != l / 2 {
        return Err(Error::Precondition(format!(
            "state must be half filled, got N = {} on L = {l}",
            phi.n()
        )));
    }
    let mut psi = fock::tensor_double(&fock::build_slater_state(phi)?)?;
    let mut probability = 1.0;
    let plus = RungProjector::bell_plus();
    for &i in a_left {
        let (img, p) = fock::apply_rung_projector(&psi, i, &plus)?;
        probability *= p;
        if p < ZERO_PROBABILITY {
            return Ok(Theorem1Report {
                probability: 0.0,
                trivial: true,
                max_overlap_amplitude: 0.0,
                max_sign_deviation: 0.0,
                passed: true,
            });
        }
        psi = img.normalized()?;
    }
    let ordering = ModeOrdering::BilayerBlock { sites: l };
    let mut a_sorted = a_left.to_vec();
    a_sorted.sort_unstable();
    // measured rungs contribute their upper-layer component
    let measured_ops: Vec<usize> = a_sorted.iter().map(|&i| ordering.rung(i).map(|r| r.0)).collect::<Result<_>>()?;
    let remain = |ar: &[usize], br: &[usize]| -> Complex64 {
        let mut ops = measured_ops.clone();
        ops.extend_from_slice(ar);
        ops.extend(br.iter().map(|&i| i + l));
        psi.amplitude_of_string(&ops)
    };

    let half = rest.len();
    let mut max_overlap: f64 = 0.0;
    let mut reference: Option<Complex64> = None;
    let mut max_dev: f64 = 0.0;
    for na in 0..=half {
        for pa in linalg::combinations(half, na) {
            let ar: Vec<usize> = pa.iter().map(|&p| rest[p]).collect();
            for pb in linalg::combinations(half, half - na) {
                let br: Vec<usize> = pb.iter().map(|&p| rest[p]).collect();
                let amp = remain(&ar, &br);
                if ar.iter().any(|x| br.contains(x)) {
                    max_overlap = max_overlap.max(amp.norm());
                    continue;
                }
                // rewriting (A_R)(B̄_R) rung by rung sorts the rung labels
                let labels = [ar.as_slice(), br.as_slice()].concat();
                let parity = if br.len() % 2 == 0 { 1.0 } else { -1.0 };
                let v = amp / (parity * linalg::sort_sign(&labels));
                match reference {
                    None => reference = Some(v),
                    Some(r) => max_dev = max_dev.max((v - r).norm()),
                }
            }
        }
    }
    let passed = max_overlap < 1e-10 && max_dev < 1e-10;
    Ok(Theorem1Report {
        probability,
        trivial: false,
        max_overlap_amplitude: max_overlap,
        max_sign_deviation: max_dev,
        passed,
    })
}

/// The 2×4 non-separable orbital matrix whose outcome on sites {0, 1} vanishes.
pub fn appendix_b_fixture() -> OrbitalMatrix {
    let s = 6f64.sqrt();
    OrbitalMatrix::from_real_rows(&[
        vec![0.5, 0.5, 0.5, 0.5],
        vec![s / 6.0, s / 6.0, 0.0, -s / 3.0],
    ])
    .expect("fixture rows are orthonormal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{random_slater, ground_state_orbitals, ChainSpec};
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn rung_projection_matches_oracle() {
        let upper = random_slater(4, 2, 5).unwrap();
        let lower = random_slater(4, 3, 6).unwrap();
        let proj = RungProjector::epsilon_minus(0.3).unwrap();
        for measured in [vec![2], vec![3, 0], vec![1, 2, 3]] {
            let r = project_rungs(&upper, &lower, &measured, &proj).unwrap();
            let mut psi = fock::tensor_product(
                &fock::build_slater_state(&upper).unwrap(),
                &fock::build_slater_state(&lower).unwrap(),
            )
            .unwrap();
            for &i in &measured {
                psi = fock::apply_rung_projector(&psi, i, &proj).unwrap().0;
            }
            assert!((r.log_probability - psi.norm_sqr().ln()).abs() < 1e-10);
            let oracle = psi.normalized().unwrap().majorana_gamma().unwrap();
            let g = crate::gaussian::gamma_from_orbitals(&r.post.unwrap()).unwrap();
            assert!(linalg::max_abs(&(oracle - g.gamma())) < 1e-10);
        }
    }

    #[test]
    fn rung_projection_zero_outcomes() {
        let upper = random_slater(4, 1, 1).unwrap();
        let plus = RungProjector::bell_plus();
        // three rungs cannot each hold one of two particles
        let r = project_rungs(&upper, &upper, &[0, 1, 2], &plus).unwrap();
        assert!(r.post.is_none() && r.log_probability == f64::NEG_INFINITY);
        let empty = OrbitalMatrix::vacuum(2);
        assert!(project_rungs(&empty, &empty, &[0], &plus).unwrap().post.is_none());
        assert!(matches!(project_rungs(&upper, &upper, &[1, 1], &plus), Err(Error::Precondition(_))));
    }

    #[test]
    fn identity_minor() {
        let phi = OrbitalMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(minor(&phi, &[0, 1], &[0, 1]).unwrap(), c(1.0));
        assert_eq!(minor(&phi, &[], &[]).unwrap(), c(1.0));
        assert!(matches!(minor(&phi, &[0], &[0, 1]), Err(Error::SizeMismatch(_))));
        assert!(matches!(minor(&phi, &[1, 0], &[0, 1]), Err(Error::Precondition(_))));
    }

    #[test]
    fn appendix_b_minor_vanishes() {
        let phi = appendix_b_fixture();
        assert!(minor(&phi, &[0, 1], &[0, 1]).unwrap().norm() < 1e-16);
        let p = postselect_probability(&phi, &[0, 1]).unwrap();
        assert!(p.half_filled);
        assert_eq!(p.probability, 0.0);
        let nonzero = linalg::combinations(4, 2)
            .iter()
            .any(|a| postselect_probability(&phi, a).unwrap().probability > 1e-3);
        assert!(nonzero);
    }

    #[test]
    fn appendix_b_amplitudes() {
        // -√6/12 (c1†c3† + 3 c1†c4† + c2†c3† + 3 c2†c4† + 2 c3†c4†) in one-based sites
        let psi = fock::build_slater_state(&appendix_b_fixture()).unwrap();
        let k = -(6f64.sqrt()) / 12.0;
        for (bits, w) in [(0b0101, 1.0), (0b1001, 3.0), (0b0110, 1.0), (0b1010, 3.0), (0b1100, 2.0)] {
            assert!((psi.amplitude(bits) - c(k * w)).norm() < 1e-14, "{bits:b}");
        }
        assert!(psi.amplitude(0b0011).norm() < 1e-15);
    }

    #[test]
    fn uniform_pair_probability() {
        let phi = OrbitalMatrix::from_real_rows(&[vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]]).unwrap();
        let p = postselect_probability(&phi, &[0]).unwrap();
        assert!((p.probability - 0.25).abs() < 1e-15);
        let c0 = correlation_submatrix(&phi, &[0]).unwrap();
        assert!((c0[(0, 0)] - c(0.5)).norm() < 1e-15);
        let spec = entanglement_spectrum(&c0).unwrap();
        assert!(spec.eps[0].abs() < 1e-14);
        assert!((log_probability_from_spectrum(&spec) + 2.0 * LN_2).abs() < 1e-14);
    }

    #[test]
    fn not_half_filled_flag() {
        let phi = random_slater(4, 1, 3).unwrap();
        let p = postselect_probability(&phi, &[0, 1]).unwrap();
        assert!(!p.half_filled);
        assert_eq!(p.probability, 0.0);
        assert_eq!(log_postselect_probability(&phi, &[0, 1]).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn spectrum_sentinels() {
        let s = EntanglementSpectrum::from_xi(vec![1.0, 0.0, 0.5, 1.0 / (1f64.exp() + 1.0)]);
        assert_eq!(s.eps[0], f64::INFINITY);
        assert!((s.eps[1] - 1.0).abs() < 1e-14);
        assert_eq!(s.eps[2], 0.0);
        assert_eq!(s.eps[3], f64::NEG_INFINITY);
        assert_eq!(log_probability_from_spectrum(&s), f64::NEG_INFINITY);
    }

    #[test]
    fn spectrum_rejects_non_hermitian() {
        let m = CMat::from_row_slice(2, 2, &[c(0.5), c(0.1), c(0.0), c(0.5)]);
        assert!(matches!(entanglement_spectrum(&m), Err(Error::Precondition(_))));
    }

    #[test]
    fn log_cosh_bounds() {
        for e in [-40.0, -3.0, -0.1, 0.0, 0.2, 5.0, 700.0] {
            let v = log_two_cosh_half(e);
            assert!(v >= 0.5 * f64::abs(e) && v <= 0.5 * f64::abs(e) + LN_2 + 1e-15);
        }
    }

    #[test]
    fn minor_and_spectrum_agree() {
        for seed in 0..10 {
            let phi = random_slater(6, 3, seed).unwrap();
            let a = [0, 2, 5];
            let p = postselect_probability(&phi, &a).unwrap().probability;
            let spec = entanglement_spectrum(&correlation_submatrix(&phi, &a).unwrap()).unwrap();
            let q = log_probability_from_spectrum(&spec).exp();
            assert!((p - q).abs() <= 1e-10 * p.max(1e-300), "{p} {q}");
            let lp = log_postselect_probability(&phi, &a).unwrap();
            assert!((lp - p.ln()).abs() < 1e-9);
        }
    }

    #[test]
    fn complement_spectrum_is_reflected() {
        let phi = random_slater(8, 4, 11).unwrap();
        let l = correlation_submatrix(&phi, &[0, 1, 4, 6]).unwrap();
        let r = correlation_submatrix(&phi, &[2, 3, 5, 7]).unwrap();
        let xl = linalg::hermitian_eigenvalues(&l);
        let mut xr: Vec<f64> = linalg::hermitian_eigenvalues(&r).iter().map(|x| 1.0 - x).collect();
        xr.sort_by(|a, b| a.total_cmp(b));
        for (a, b) in xl.iter().zip(&xr) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn critical_chain_spectrum_is_symmetric() {
        let phi = ground_state_orbitals(&ChainSpec::half_filled(8, 0.0).unwrap()).unwrap();
        let spec = entanglement_spectrum(&correlation_submatrix(&phi, &[0, 1, 2, 3]).unwrap()).unwrap();
        let mut neg: Vec<f64> = spec.eps.iter().map(|e| -e).collect();
        neg.sort_by(|a, b| a.total_cmp(b));
        let mut eps = spec.eps.clone();
        eps.sort_by(|a, b| a.total_cmp(b));
        for (a, b) in eps.iter().zip(&neg) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn plucker_minimal_and_degenerate() {
        let m = CMat::from_row_slice(1, 2, &[c(0.3), c(-1.7)]);
        assert!(plucker_single_residual(&m, &[], &[0, 1]).unwrap() < 1e-15);
        let ones = CMat::from_element(2, 4, c(1.0));
        assert_eq!(plucker_single_residual(&ones, &[0], &[1, 2, 3]).unwrap(), 0.0);
        assert!(matches!(
            plucker_single_residual(&ones, &[0, 1], &[1, 2, 3]),
            Err(Error::SizeMismatch(_))
        ));
    }

    #[test]
    fn plucker_general_reduces_to_single() {
        let phi = random_slater(6, 3, 5).unwrap();
        let m = phi.matrix();
        let a = [1, 4];
        let b = [0, 2, 3, 5];
        let single = plucker_single_residual(m, &a, &b).unwrap();
        let general = plucker_general_residual(m, &a, &[], &b).unwrap();
        assert!(single < 1e-12 && general < 1e-12);
        assert!(plucker_general_residual(m, &[2], &[4], &[0, 1, 3, 5]).unwrap() < 1e-11);
    }

    #[test]
    fn plucker_detects_sign_fault() {
        // flipping one term breaks the relation
        let phi = random_slater(4, 2, 9).unwrap();
        let m = phi.matrix();
        let mut terms = plucker_single_terms(m, &[0], &[1, 2, 3]).unwrap();
        assert!(relative_residual(&terms) < 1e-12);
        terms[1] = -terms[1];
        assert!(relative_residual(&terms) > 1e-3);
    }

    #[test]
    fn theorem1_checks_small() {
        let phi = OrbitalMatrix::from_real_rows(&[vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]]).unwrap();
        let r = theorem1_wavefunction_checks(&phi, &[0]).unwrap();
        assert!(r.passed && !r.trivial);
        assert!((r.probability - 0.25).abs() < 1e-14);
        for seed in 0..3 {
            let phi = random_slater(6, 3, seed).unwrap();
            let r = theorem1_wavefunction_checks(&phi, &[1, 3, 4]).unwrap();
            assert!(r.passed, "{r:?}");
        }
        let r = theorem1_wavefunction_checks(&appendix_b_fixture(), &[0, 1]).unwrap();
        assert!(r.trivial);
    }

    #[test]
    fn block_minor_factorizes() {
        let a = random_slater(4, 2, 1).unwrap();
        let b = random_slater(4, 2, 2).unwrap();
        let mut m = CMat::zeros(4, 8);
        m.view_mut((0, 0), (2, 4)).copy_from(a.matrix());
        m.view_mut((2, 4), (2, 4)).copy_from(b.matrix());
        let full = ordered_minor(&m, &[0, 3, 5, 6]);
        let prod = ordered_minor(a.matrix(), &[0, 3]) * ordered_minor(b.matrix(), &[1, 2]);
        assert!((full - prod).norm() < 1e-12);
    }
}
