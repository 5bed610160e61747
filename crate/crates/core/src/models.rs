//! Initial states: open-chain ground states, Haar-random Slater determinants,
//! and the asymptotic entanglement-level spacing of the massive chain.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::orbital::OrbitalMatrix;

/// Minimum single-particle gap at the Fermi level.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
}

/// Open chain `H = -1/2 Σ (c_i† c_{i+1} + h.c.) + m0 Σ (-1)^i c_i† c_i`, with
/// the staggering counted from 1 so site index 0 carries `-m0`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ChainSpec {
    pub l: usize,
    pub m0: f64,
    pub boundary: Boundary,
    /// Particle count.
    pub n: usize,
}

impl ChainSpec {
    pub fn half_filled(l: usize, m0: f64) -> Result<Self> {
        let spec = Self {
            l,
            m0,
            boundary: Boundary::Open,
            n: l / 2,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l == 0 || self.l % 2 != 0 {
            return Err(Error::Precondition(format!(
                "chain length must be positive and even, got {}",
                self.l
            )));
        }
        if self.n > self.l {
            return Err(Error::Precondition(format!(
                "filling {} exceeds {} sites",
                self.n, self.l
            )));
        }
        if !self.m0.is_finite() {
            return Err(Error::Precondition("mass must be finite".into()));
        }
        Ok(())
    }

    /// Same chain with the staggered mass shifted by `dm`.
    pub fn with_mass_offset(&self, dm: f64) -> Self {
        Self {
            m0: self.m0 + dm,
            ..*self
        }
    }

    /// Real symmetric single-particle Hamiltonian.
    pub fn hopping_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.l, self.l, |i, j| {
            if i == j {
                if i % 2 == 0 {
                    -self.m0
                } else {
                    self.m0
                }
            } else if i.abs_diff(j) == 1 {
                -0.5
            } else {
                0.0
            }
        })
    }
}

/// Rows are the `n` lowest single-particle eigenvectors. Each row's largest
/// component is made positive so the output is reproducible.
pub fn ground_state_orbitals(spec: &ChainSpec) -> Result<OrbitalMatrix> {
    spec.validate()?;
    let eig = SymmetricEigen::new(spec.hopping_matrix());
    let mut order: Vec<usize> = (0..spec.l).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    if spec.n > 0 && spec.n < spec.l {
        let gap = eig.eigenvalues[order[spec.n]] - eig.eigenvalues[order[spec.n - 1]];
        if gap < DEGENERACY_TOL {
            return Err(Error::DegenerateFermiLevel { gap, n: spec.n });
        }
    }
    let mut phi = CMat::zeros(spec.n, spec.l);
    for (q, &k) in order.iter().take(spec.n).enumerate() {
        let v = eig.eigenvectors.column(k);
        let pivot = v.iter().copied().fold(0.0, |m: f64, x| if x.abs() > m.abs() { x } else { m });
        let s = pivot.signum();
        for i in 0..spec.l {
            phi[(q, i)] = Complex64::new(s * v[i], 0.0);
        }
    }
    OrbitalMatrix::new(phi)
}

/// Haar-random `n`-particle Slater determinant on `l` sites, deterministic per seed.
pub fn random_slater(l: usize, n: usize, seed: u64) -> Result<OrbitalMatrix> {
    if n > l {
        return Err(Error::Precondition(format!("{n} particles on {l} sites")));
    }
    if n == 0 {
        return Ok(OrbitalMatrix::vacuum(l));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let a = CMat::from_fn(l, n, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im)
    });
    let qr = a.qr();
    let (q, r) = (qr.q(), qr.r());
    // fix the phase freedom of the QR factors so the distribution is Haar
    let phi = CMat::from_fn(n, l, |row, i| {
        let d = r[(row, row)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        q[(i, row)] * phase
    });
    OrbitalMatrix::new(phi)
}

/// Complete elliptic integral of the first kind `K(k)` via the
/// arithmetic-geometric mean.
pub fn elliptic_k(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain(format!("elliptic modulus must lie in [0, 1), got {k}")));
    }
    Ok(k_from_complement((1.0 - k * k).sqrt()))
}

/// `K` as `π / (2 AGM(1, k'))`, taking the complementary modulus directly so
/// moduli close to 1 keep full precision.
fn k_from_complement(kp: f64) -> f64 {
    let (mut a, mut b) = (1.0f64, kp);
    for _ in 0..60 {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    std::f64::consts::PI / (a + b)
}

/// Asymptotic level spacing `2π K(κ') / K(κ)` of the massive chain's
/// half-cut entanglement spectrum, with `κ = 1/√(1+m0²)`.
pub fn eisler_level_spacing(m0: f64) -> Result<f64> {
    if !(m0 > 0.0) || !m0.is_finite() {
        return Err(Error::Domain(format!("mass must be positive and finite, got {m0}")));
    }
    let norm = m0.hypot(1.0);
    let kappa = 1.0 / norm;
    let kappa_p = m0 / norm;
    // K(κ') needs complement κ, K(κ) needs complement κ'
    Ok(2.0 * std::f64::consts::PI * k_from_complement(kappa) / k_from_complement(kappa_p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn two_site_chain() {
        let phi = ground_state_orbitals(&ChainSpec::half_filled(2, 0.0).unwrap()).unwrap();
        assert!((phi.get(0, 0).re - FRAC_1_SQRT_2).abs() < 1e-14);
        assert!((phi.get(0, 1).re - FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn staggered_sign() {
        let h = ChainSpec::half_filled(4, 0.7).unwrap().hopping_matrix();
        assert_eq!(h[(0, 0)], -0.7);
        assert_eq!(h[(1, 1)], 0.7);
        assert_eq!(h[(0, 1)], -0.5);
        assert_eq!(h[(0, 2)], 0.0);
    }

    #[test]
    fn heavy_mass_localizes() {
        let phi = ground_state_orbitals(&ChainSpec::half_filled(6, 1e4).unwrap()).unwrap();
        let c = phi.correlation();
        for i in 0..6 {
            let expected = if i % 2 == 0 { 1.0 } else { 0.0 };
            assert!((c[(i, i)].re - expected).abs() < 1e-6);
        }
    }

    #[test]
    fn open_chain_levels_are_simple() {
        let spec = ChainSpec {
            l: 4,
            m0: 0.0,
            boundary: Boundary::Open,
            n: 2,
        };
        assert!(ground_state_orbitals(&spec).is_ok());
        let mut h_spec = spec;
        h_spec.n = 3;
        assert!(ground_state_orbitals(&h_spec).is_ok());
    }

    #[test]
    fn rejects_odd_chain() {
        assert!(matches!(ChainSpec::half_filled(5, 0.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn random_slater_is_deterministic_and_orthonormal() {
        let a = random_slater(8, 4, 17).unwrap();
        let b = random_slater(8, 4, 17).unwrap();
        assert_eq!(a, b);
        assert!(a.orthonormality_error() < 1e-12);
        assert_ne!(a, random_slater(8, 4, 18).unwrap());
        assert_eq!(random_slater(5, 0, 1).unwrap().n(), 0);
    }

    #[test]
    fn elliptic_values() {
        assert!((elliptic_k(0.0).unwrap() - PI / 2.0).abs() < 1e-14);
        assert!((elliptic_k(FRAC_1_SQRT_2).unwrap() - 1.854_074_677_301_372).abs() < 1e-12);
        assert!(matches!(elliptic_k(1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn eisler_values() {
        assert!((eisler_level_spacing(1.0).unwrap() - 2.0 * PI).abs() < 1e-12);
        // the spacing closes only logarithmically at criticality
        assert!(eisler_level_spacing(1e-12).unwrap() < 0.4);
        assert!(eisler_level_spacing(1e-12).unwrap() < eisler_level_spacing(1e-6).unwrap());
        assert!(eisler_level_spacing(1e12).unwrap() > 100.0);
        assert!((eisler_level_spacing(0.3).unwrap() - 3.7786).abs() < 1e-3);
        assert!((eisler_level_spacing(1.5).unwrap() - 7.5474).abs() < 1e-3);
        assert!((eisler_level_spacing(0.5).unwrap() - 4.6197).abs() < 1e-3);
        assert!(eisler_level_spacing(0.0).is_err());
    }
}
