//! Dense Fock-space simulator used as the brute-force oracle.
//!
//! A state on `M` modes is a vector of `2^M` amplitudes. Bit `j` of a basis
//! index is the occupation of mode `j`, and the basis vector for an occupation
//! set `{j_1 < j_2 < ...}` is `c_{j_1}† c_{j_2}† ... |vac⟩`, so creation and
//! annihilation operators carry the Jordan-Wigner sign
//! `(-1)^{#occupied modes below j}`.
//!
//! Operators that act on a subset of modes (rung projectors, partial traces)
//! first rewrite every basis string with the affected modes moved to the
//! front, act there, and rewrite back. The sign of that reordering is the
//! only place fermionic statistics enter.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::orbital::OrbitalMatrix;

/// Largest mode count the dense oracle accepts.
pub const MAX_MODES: usize = 16;

const NORM_TOL: f64 = 1e-10;

/// How physical sites map onto fermionic modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeOrdering {
    /// One layer of `sites` modes.
    SingleLayer { sites: usize },
    /// Upper site `i` is mode `i`, lower site `ī` is mode `sites + i`.
    BilayerBlock { sites: usize },
}

impl ModeOrdering {
    pub fn num_modes(&self) -> usize {
        match *self {
            ModeOrdering::SingleLayer { sites } => sites,
            ModeOrdering::BilayerBlock { sites } => 2 * sites,
        }
    }

    pub fn sites(&self) -> usize {
        match *self {
            ModeOrdering::SingleLayer { sites } | ModeOrdering::BilayerBlock { sites } => sites,
        }
    }

    /// Bilayer layout for a state on `num_modes` modes.
    pub fn bilayer_for(num_modes: usize) -> Result<Self> {
        if num_modes % 2 != 0 {
            return Err(Error::Precondition(format!(
                "bilayer layout needs an even mode count, got {num_modes}"
            )));
        }
        Ok(ModeOrdering::BilayerBlock {
            sites: num_modes / 2,
        })
    }

    /// The `(upper, lower)` mode pair of rung `i`.
    pub fn rung(&self, i: usize) -> Result<(usize, usize)> {
        match *self {
            ModeOrdering::BilayerBlock { sites } if i < sites => Ok((i, sites + i)),
            ModeOrdering::BilayerBlock { sites } => Err(Error::IndexOutOfRange {
                index: i,
                bound: sites,
            }),
            ModeOrdering::SingleLayer { .. } => Err(Error::Precondition(
                "rungs exist only in the bilayer layout".into(),
            )),
        }
    }
}

/// Normalized two-mode state used as a rung projector target.
///
/// Amplitudes are indexed by `n_a + 2 n_b` for the mode pair `(a, b)`, with
/// the doubly occupied component defined as `c_a† c_b† |vac⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairState(pub [Complex64; 4]);

impl PairState {
    /// `(|00⟩ + |11⟩)/√2`, the even-parity Bell state.
    pub fn even_bell() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PairState([linalg::c(s), Complex64::default(), Complex64::default(), linalg::c(s)])
    }

    /// Single-occupancy state `(α c_a† + β c_b†)|vac⟩`.
    pub fn single(alpha: Complex64, beta: Complex64) -> Self {
        PairState([Complex64::default(), alpha, beta, Complex64::default()])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Dense amplitude vector over the `2^M` occupation basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    num_modes: usize,
    amps: Vec<Complex64>,
}

fn check_capacity(modes: usize) -> Result<()> {
    if modes > MAX_MODES {
        return Err(Error::Capacity {
            modes,
            max: MAX_MODES,
        });
    }
    Ok(())
}

#[inline]
fn below(bits: usize, j: usize) -> u32 {
    (bits & ((1usize << j) - 1)).count_ones()
}

#[inline]
fn jw_sign(bits: usize, j: usize) -> f64 {
    if below(bits, j) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl FockState {
    pub fn new(num_modes: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_capacity(num_modes)?;
        if amps.len() != 1 << num_modes {
            return Err(Error::SizeMismatch(format!(
                "{} amplitudes for {num_modes} modes",
                amps.len()
            )));
        }
        Ok(Self { num_modes, amps })
    }

    pub fn vacuum(num_modes: usize) -> Result<Self> {
        check_capacity(num_modes)?;
        let mut amps = vec![Complex64::default(); 1 << num_modes];
        amps[0] = linalg::c(1.0);
        Ok(Self { num_modes, amps })
    }

    /// `c_{j_1}† c_{j_2}† ... |vac⟩` for the creation string `ops`, applied
    /// in the written order (rightmost acts first).
    pub fn from_creation_string(num_modes: usize, ops: &[usize]) -> Result<Self> {
        let mut psi = Self::vacuum(num_modes)?;
        for &j in ops.iter().rev() {
            psi = psi.create(j)?;
        }
        Ok(psi)
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, bits: usize) -> Complex64 {
        self.amps[bits]
    }

    /// Coefficient of the creation string `ops` (distinct modes, any order).
    pub fn amplitude_of_string(&self, ops: &[usize]) -> Complex64 {
        let bits = ops.iter().fold(0usize, |b, &j| b | (1 << j));
        self.amps[bits] * linalg::sort_sign(ops)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n <= 0.0 {
            return Err(Error::Precondition("cannot normalize the zero vector".into()));
        }
        let s = 1.0 / n.sqrt();
        Ok(Self {
            num_modes: self.num_modes,
            amps: self.amps.iter().map(|z| z * s).collect(),
        })
    }

    fn require_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::Precondition(format!(
                "state is not normalized (norm² = {n})"
            )));
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockState) -> Result<Complex64> {
        if self.num_modes != other.num_modes {
            return Err(Error::SizeMismatch(format!(
                "{} vs {} modes",
                self.num_modes, other.num_modes
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Hamming weights carrying non-negligible amplitude.
    pub fn support_weights(&self, tol: f64) -> Vec<u32> {
        let mut w: Vec<u32> = self
            .amps
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > tol)
            .map(|(b, _)| b.count_ones())
            .collect();
        w.sort_unstable();
        w.dedup();
        w
    }

    fn check_mode(&self, j: usize) -> Result<()> {
        if j >= self.num_modes {
            return Err(Error::IndexOutOfRange {
                index: j,
                bound: self.num_modes,
            });
        }
        Ok(())
    }

    /// `c_j† |ψ⟩`.
    pub fn create(&self, j: usize) -> Result<Self> {
        self.check_mode(j)?;
        let mut out = vec![Complex64::default(); self.amps.len()];
        for (bits, &a) in self.amps.iter().enumerate() {
            if a == Complex64::default() || bits & (1 << j) != 0 {
                continue;
            }
            out[bits | (1 << j)] += a * jw_sign(bits, j);
        }
        Ok(Self {
            num_modes: self.num_modes,
            amps: out,
        })
    }

    /// `c_j |ψ⟩`.
    pub fn annihilate(&self, j: usize) -> Result<Self> {
        self.check_mode(j)?;
        let mut out = vec![Complex64::default(); self.amps.len()];
        for (bits, &a) in self.amps.iter().enumerate() {
            if a == Complex64::default() || bits & (1 << j) == 0 {
                continue;
            }
            out[bits & !(1 << j)] += a * jw_sign(bits, j);
        }
        Ok(Self {
            num_modes: self.num_modes,
            amps: out,
        })
    }

    /// `Σ_j coeffs[j] c_j† |ψ⟩` over the first `coeffs.len()` modes starting at `offset`.
    fn create_orbital(&self, offset: usize, coeffs: &[Complex64]) -> Result<Self> {
        let mut out = vec![Complex64::default(); self.amps.len()];
        for (k, &w) in coeffs.iter().enumerate() {
            if w == Complex64::default() {
                continue;
            }
            let j = offset + k;
            self.check_mode(j)?;
            for (bits, &a) in self.amps.iter().enumerate() {
                if a == Complex64::default() || bits & (1 << j) != 0 {
                    continue;
                }
                out[bits | (1 << j)] += w * a * jw_sign(bits, j);
            }
        }
        Ok(Self {
            num_modes: self.num_modes,
            amps: out,
        })
    }

    fn scale(&mut self, s: Complex64) {
        for z in &mut self.amps {
            *z *= s;
        }
    }

    fn add_scaled(&mut self, other: &FockState, s: Complex64) {
        for (z, w) in self.amps.iter_mut().zip(&other.amps) {
            *z += w * s;
        }
    }

    /// Majorana images `a_{2j} ψ = (c_j + c_j†) ψ` and `a_{2j+1} ψ = -i (c_j - c_j†) ψ`.
    fn majorana_images(&self) -> Result<Vec<FockState>> {
        let mut out = Vec::with_capacity(2 * self.num_modes);
        let i = Complex64::i();
        for j in 0..self.num_modes {
            let cj = self.annihilate(j)?;
            let cdj = self.create(j)?;
            let mut x = cj.clone();
            x.add_scaled(&cdj, linalg::c(1.0));
            let mut y = cj;
            y.add_scaled(&cdj, linalg::c(-1.0));
            y.scale(-i);
            out.push(x);
            out.push(y);
        }
        Ok(out)
    }

    /// `Γ_{kl} = ⟨a_k a_l⟩ − δ_{kl}` for a normalized state, computed by
    /// applying the Majorana operators directly.
    pub fn majorana_gamma(&self) -> Result<CMat> {
        self.require_normalized()?;
        let imgs = self.majorana_images()?;
        let n = imgs.len();
        let mut g = CMat::zeros(n, n);
        for k in 0..n {
            for l in 0..n {
                let v = imgs[k].inner(&imgs[l])?;
                g[(k, l)] = if k == l { v - 1.0 } else { v };
            }
        }
        Ok(g)
    }

    /// Real antisymmetric `R` with `Γ = iR`.
    pub fn majorana_r(&self) -> Result<DMatrix<f64>> {
        let g = self.majorana_gamma()?;
        Ok(g.map(|z| (z * -Complex64::i()).re))
    }

    /// `C_{ij} = ⟨c_i† c_j⟩` for a normalized state.
    pub fn correlation_matrix(&self) -> Result<CMat> {
        self.require_normalized()?;
        let imgs: Vec<FockState> = (0..self.num_modes)
            .map(|j| self.annihilate(j))
            .collect::<Result<_>>()?;
        let m = self.num_modes;
        let mut c = CMat::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                c[(i, j)] = imgs[i].inner(&imgs[j])?;
            }
        }
        Ok(c)
    }
}

/// `∏_q b_q† |vac⟩` with `b_q† = Σ_i Φ_{qi} c_i†`, built by operator
/// application (`b_1†` leftmost). The amplitude on occupation set `A` is the
/// minor `det Φ([N], A)`.
pub fn build_slater_state(phi: &OrbitalMatrix) -> Result<FockState> {
    check_capacity(phi.l())?;
    let dev = phi.orthonormality_error();
    if dev > crate::orbital::ORTHONORMAL_TOL {
        return Err(Error::Precondition(format!(
            "orbital rows are not orthonormal (deviation {dev:.3e})"
        )));
    }
    let mut psi = FockState::vacuum(phi.l())?;
    for q in (0..phi.n()).rev() {
        let row: Vec<Complex64> = (0..phi.l()).map(|i| phi.get(q, i)).collect();
        psi = psi.create_orbital(0, &row)?;
    }
    Ok(psi)
}

/// `|upper⟩ ⊗ |lower⟩` in the bilayer-block ordering, with every upper-layer
/// creation operator to the left of every lower-layer one.
pub fn tensor_product(upper: &FockState, lower: &FockState) -> Result<FockState> {
    let m = upper.num_modes + lower.num_modes;
    check_capacity(m)?;
    let mut amps = vec![Complex64::default(); 1 << m];
    for (sl, &bl) in lower.amps.iter().enumerate() {
        if bl == Complex64::default() {
            continue;
        }
        for (su, &au) in upper.amps.iter().enumerate() {
            amps[su | (sl << upper.num_modes)] = au * bl;
        }
    }
    FockState::new(m, amps)
}

/// Doubled state `|ψ⟩ ⊗ |ψ̄⟩` on `2L` modes.
pub fn tensor_double(state: &FockState) -> Result<FockState> {
    tensor_product(state, state)
}

/// Sign picked up when the operators on modes `a` then `b` are moved to the
/// front of the canonical creation string of `rest | occupancy(a, b)`.
#[inline]
fn front_sign(rest: usize, a: usize, na: bool, b: usize, nb: bool) -> f64 {
    let mut k = 0;
    if na {
        k += below(rest, a);
    }
    if nb {
        k += below(rest, b);
    }
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Apply `|χ⟩⟨χ| ⊗ 1` on the mode pair `(a, b)`; returns the unnormalized
/// image and its squared norm.
pub fn apply_two_mode_projector(
    state: &FockState,
    a: usize,
    b: usize,
    chi: &PairState,
) -> Result<(FockState, f64)> {
    state.check_mode(a)?;
    state.check_mode(b)?;
    if a == b {
        return Err(Error::Precondition("projector modes must differ".into()));
    }
    if (chi.norm_sqr() - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "pair state is not normalized (norm² = {})",
            chi.norm_sqr()
        )));
    }
    let mask = (1usize << a) | (1usize << b);
    let mut out = vec![Complex64::default(); state.amps.len()];
    for rest in 0..state.amps.len() {
        if rest & mask != 0 {
            continue;
        }
        let mut idx = [0usize; 4];
        let mut sign = [0f64; 4];
        let mut overlap = Complex64::default();
        for k in 0..4 {
            let (na, nb) = (k & 1 == 1, k & 2 == 2);
            idx[k] = rest | (usize::from(na) << a) | (usize::from(nb) << b);
            sign[k] = front_sign(rest, a, na, b, nb);
            overlap += chi.0[k].conj() * state.amps[idx[k]] * sign[k];
        }
        if overlap == Complex64::default() {
            continue;
        }
        for k in 0..4 {
            out[idx[k]] = chi.0[k] * overlap * sign[k];
        }
    }
    let projected = FockState {
        num_modes: state.num_modes,
        amps: out,
    };
    let p = projected.norm_sqr();
    Ok((projected, p))
}

/// Project rung `rung` of a bilayer state onto an arbitrary normalized pair state.
pub fn apply_pair_state_projector(
    state: &FockState,
    rung: usize,
    pair_state: &PairState,
) -> Result<(FockState, f64)> {
    let (u, d) = ModeOrdering::bilayer_for(state.num_modes)?.rung(rung)?;
    apply_two_mode_projector(state, u, d, pair_state)
}

/// Project rung `rung` onto `(α c_i† + β c_ī†)|vac⟩`.
pub fn apply_rung_projector(
    state: &FockState,
    rung: usize,
    proj: &crate::protocol::RungProjector,
) -> Result<(FockState, f64)> {
    apply_pair_state_projector(state, rung, &proj.pair_state())
}

fn distinct_modes(state: &FockState, modes: &[usize]) -> Result<()> {
    if modes.is_empty() {
        return Err(Error::Precondition("empty mode set".into()));
    }
    let mut seen = 0usize;
    for &j in modes {
        state.check_mode(j)?;
        if seen & (1 << j) != 0 {
            return Err(Error::Precondition(format!("mode {j} listed twice")));
        }
        seen |= 1 << j;
    }
    Ok(())
}

/// Amplitudes reshaped as `Ψ[kept, rest]` after moving the kept modes (in
/// the listed order) to the front of every creation string.
fn bipartite_matrix(state: &FockState, modes: &[usize]) -> Result<CMat> {
    distinct_modes(state, modes)?;
    let kept_mask = modes.iter().fold(0usize, |m, &j| m | (1 << j));
    let rest: Vec<usize> = (0..state.num_modes)
        .filter(|j| kept_mask & (1 << j) == 0)
        .collect();
    let mut psi = CMat::zeros(1 << modes.len(), 1 << rest.len());
    let mut order = Vec::with_capacity(state.num_modes);
    for (bits, &amp) in state.amps.iter().enumerate() {
        if amp == Complex64::default() {
            continue;
        }
        order.clear();
        let mut ki = 0usize;
        for (k, &j) in modes.iter().enumerate() {
            if bits & (1 << j) != 0 {
                order.push(j);
                ki |= 1 << k;
            }
        }
        let mut ri = 0usize;
        for (k, &j) in rest.iter().enumerate() {
            if bits & (1 << j) != 0 {
                order.push(j);
                ri |= 1 << k;
            }
        }
        psi[(ki, ri)] = amp * linalg::sort_sign(&order);
    }
    Ok(psi)
}

/// Reduced density matrix on `modes`, indexed by the occupation bits of the
/// kept modes in the listed order.
pub fn reduced_density_matrix(state: &FockState, modes: &[usize]) -> Result<CMat> {
    let psi = bipartite_matrix(state, modes)?;
    let rho = &psi * psi.adjoint();
    let tr: Complex64 = rho.trace();
    if tr.norm() <= 0.0 {
        return Err(Error::Precondition("zero state has no density matrix".into()));
    }
    Ok(rho / tr)
}

/// Von Neumann entropy (nats) of the reduced state on `modes`.
pub fn entanglement_entropy(state: &FockState, modes: &[usize]) -> Result<f64> {
    state.require_normalized()?;
    let psi = bipartite_matrix(state, modes)?;
    // the smaller Gram matrix has the same nonzero spectrum
    let gram = if psi.nrows() <= psi.ncols() {
        &psi * psi.adjoint()
    } else {
        psi.adjoint() * &psi
    };
    Ok(linalg::spectrum_entropy(linalg::hermitian_eigenvalues(&gram)))
}

/// `|⟨a|b⟩|²` for normalized states.
pub fn fidelity(a: &FockState, b: &FockState) -> Result<f64> {
    a.require_normalized()?;
    b.require_normalized()?;
    Ok(a.inner(b)?.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::RungProjector;
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn uniform_pair() -> OrbitalMatrix {
        OrbitalMatrix::from_real_rows(&[vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]]).unwrap()
    }

    #[test]
    fn slater_single_site() {
        let phi = OrbitalMatrix::from_real_rows(&[vec![1.0, 0.0]]).unwrap();
        let psi = build_slater_state(&phi).unwrap();
        assert_eq!(psi.amplitude(0b01), c(1.0));
        assert_eq!(psi.norm_sqr(), 1.0);
    }

    #[test]
    fn slater_uniform_pair() {
        let psi = build_slater_state(&uniform_pair()).unwrap();
        assert!((psi.amplitude(0b01) - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((psi.amplitude(0b10) - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert_eq!(psi.amplitude(0b11), c(0.0));
    }

    #[test]
    fn slater_filled() {
        let phi = OrbitalMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let psi = build_slater_state(&phi).unwrap();
        assert_eq!(psi.amplitude(0b11), c(1.0));
    }

    #[test]
    fn slater_rejects_bad_input() {
        let wide = OrbitalMatrix::vacuum(17);
        assert!(matches!(
            build_slater_state(&wide),
            Err(Error::Capacity { modes: 17, .. })
        ));
        let skew = OrbitalMatrix::from_matrix_unchecked(DMatrix::from_element(1, 2, c(1.0)));
        assert!(matches!(
            build_slater_state(&skew),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn double_of_single_site() {
        let phi = OrbitalMatrix::from_real_rows(&[vec![1.0, 0.0]]).unwrap();
        let d = tensor_double(&build_slater_state(&phi).unwrap()).unwrap();
        assert_eq!(d.num_modes(), 4);
        assert_eq!(d.amplitude(0b0101), c(1.0));
    }

    #[test]
    fn double_of_uniform_pair() {
        let d = tensor_double(&build_slater_state(&uniform_pair()).unwrap()).unwrap();
        for bits in [0b0101, 0b1001, 0b0110, 0b1010] {
            assert!((d.amplitude(bits).norm() - 0.5).abs() < 1e-15);
        }
        assert!((d.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn double_capacity() {
        let phi = OrbitalMatrix::vacuum(9);
        let psi = build_slater_state(&phi).unwrap();
        assert!(matches!(tensor_double(&psi), Err(Error::Capacity { .. })));
    }

    #[test]
    fn bell_projection_of_uniform_pair() {
        let d = tensor_double(&build_slater_state(&uniform_pair()).unwrap()).unwrap();
        let (post, p) = apply_rung_projector(&d, 0, &RungProjector::bell_plus()).unwrap();
        assert!((p - 0.25).abs() < 1e-14);
        let post = post.normalized().unwrap();
        let ideal = FockState::from_creation_string(4, &[0, 2])
            .unwrap()
            .normalized()
            .unwrap();
        // ideal |+⟩_{0,0̄} ⊗ |−⟩_{1,1̄} built from orbital creation operators
        let plus = [c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)];
        let minus = [c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)];
        let vac = FockState::vacuum(4).unwrap();
        let mut r = vac.create(1).unwrap();
        r.scale(minus[0]);
        r.add_scaled(&vac.create(3).unwrap(), minus[1]);
        let mut full = r.create(0).unwrap();
        full.scale(plus[0]);
        full.add_scaled(&r.create(2).unwrap(), plus[1]);
        assert!((fidelity(&post, &full).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&post, &ideal).unwrap() < 1.0);
    }

    #[test]
    fn bell_projector_kills_double_occupancy() {
        let psi = FockState::from_creation_string(4, &[0, 2]).unwrap();
        let (img, p) = apply_rung_projector(&psi, 0, &RungProjector::bell_plus()).unwrap();
        assert_eq!(p, 0.0);
        assert!(img.amplitudes().iter().all(|z| *z == Complex64::default()));
    }

    #[test]
    fn rung_out_of_range() {
        let psi = FockState::vacuum(4).unwrap();
        assert!(matches!(
            apply_rung_projector(&psi, 2, &RungProjector::bell_plus()),
            Err(Error::IndexOutOfRange { index: 2, bound: 2 })
        ));
    }

    #[test]
    fn pair_state_matches_rung_projector() {
        let d = tensor_double(&build_slater_state(&uniform_pair()).unwrap()).unwrap();
        let s = c(FRAC_1_SQRT_2);
        let (a, pa) = apply_pair_state_projector(&d, 0, &PairState::single(s, s)).unwrap();
        let (b, pb) = apply_rung_projector(&d, 0, &RungProjector::bell_plus()).unwrap();
        assert_eq!(pa, pb);
        assert_eq!(a, b);
    }

    #[test]
    fn empty_pair_projection() {
        let d = tensor_double(&build_slater_state(&uniform_pair()).unwrap()).unwrap();
        let empty = PairState([c(1.0), c(0.0), c(0.0), c(0.0)]);
        let (post, p) = apply_pair_state_projector(&d, 0, &empty).unwrap();
        assert!((p - 0.25).abs() < 1e-14);
        let post = post.normalized().unwrap();
        // remainder is c_1† c_1̄† |vac⟩
        let expected = FockState::from_creation_string(4, &[1, 3]).unwrap();
        assert!((fidelity(&post, &expected).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rdm_of_bell_pair() {
        let vac = FockState::vacuum(2).unwrap();
        let mut bell = vac.create(0).unwrap();
        bell.add_scaled(&vac.create(1).unwrap(), c(1.0));
        let bell = bell.normalized().unwrap();
        let rho = reduced_density_matrix(&bell, &[0]).unwrap();
        assert!((rho[(0, 0)] - c(0.5)).norm() < 1e-15);
        assert!((rho[(1, 1)] - c(0.5)).norm() < 1e-15);
        assert!(rho[(0, 1)].norm() < 1e-15);
        assert!((entanglement_entropy(&bell, &[0]).unwrap() - LN_2).abs() < 1e-14);
    }

    #[test]
    fn rdm_errors() {
        let vac = FockState::vacuum(2).unwrap();
        assert!(matches!(
            reduced_density_matrix(&vac, &[]),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            reduced_density_matrix(&vac, &[0, 0]),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            reduced_density_matrix(&vac, &[5]),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn product_state_entropy() {
        let psi = FockState::from_creation_string(4, &[0, 3]).unwrap();
        let rho = reduced_density_matrix(&psi, &[0, 1]).unwrap();
        let eig = linalg::hermitian_eigenvalues(&rho);
        assert_eq!(eig.iter().filter(|&&x| x > 1e-12).count(), 1);
        assert!(entanglement_entropy(&psi, &[1, 2]).unwrap().abs() < 1e-14);
    }

    #[test]
    fn fidelity_basics() {
        let a = FockState::from_creation_string(2, &[0]).unwrap();
        let b = FockState::from_creation_string(2, &[1]).unwrap();
        assert_eq!(fidelity(&a, &a).unwrap(), 1.0);
        assert_eq!(fidelity(&a, &b).unwrap(), 0.0);
        let c3 = FockState::vacuum(3).unwrap();
        assert!(matches!(fidelity(&a, &c3), Err(Error::SizeMismatch(_))));
    }

    #[test]
    fn string_amplitude_tracks_order() {
        let psi = FockState::from_creation_string(3, &[2, 0]).unwrap();
        assert_eq!(psi.amplitude(0b101), c(-1.0));
        assert_eq!(psi.amplitude_of_string(&[2, 0]), c(1.0));
        assert_eq!(psi.amplitude_of_string(&[0, 2]), c(-1.0));
    }

    #[test]
    fn majorana_of_vacuum_and_filled() {
        let vac = FockState::vacuum(1).unwrap();
        let r = vac.majorana_r().unwrap();
        let filled = FockState::from_creation_string(1, &[0]).unwrap();
        let rf = filled.majorana_r().unwrap();
        assert!((r[(0, 1)] - 1.0).abs() < 1e-15);
        assert!((r[(1, 0)] + 1.0).abs() < 1e-15);
        assert!((rf[(0, 1)] + 1.0).abs() < 1e-15);
        assert_eq!(r[(0, 0)], 0.0);
    }
}
