use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

/// Orthonormality tolerance for state-representing orbital matrices.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// N×L orbital matrix Φ: row `q` holds the amplitudes of orbital
/// `b_q† = Σ_i Φ_{qi} c_i†` on the `L` sites.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitalMatrix {
    data: CMat,
}

impl OrbitalMatrix {
    /// Wrap a matrix whose rows must be orthonormal within 1e-10.
    pub fn new(data: DMatrix<Complex64>) -> Result<Self> {
        let m = Self { data };
        let dev = m.orthonormality_error();
        if dev > ORTHONORMAL_TOL {
            return Err(Error::Precondition(format!(
                "orbital rows are not orthonormal (max |ΦΦ† - I| = {dev:.3e})"
            )));
        }
        Ok(m)
    }

    /// Wrap any matrix. Used by the Plücker relation checks, which accept
    /// arbitrary full-rank matrices.
    pub fn from_matrix_unchecked(data: DMatrix<Complex64>) -> Self {
        Self { data }
    }

    /// Build from real row vectors.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let l = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != l) {
            return Err(Error::SizeMismatch("ragged orbital rows".into()));
        }
        Self::new(DMatrix::from_fn(n, l, |q, i| linalg::c(rows[q][i])))
    }

    /// Empty (vacuum) orbital matrix on `l` sites.
    pub fn vacuum(l: usize) -> Self {
        Self {
            data: DMatrix::zeros(0, l),
        }
    }

    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn l(&self) -> usize {
        self.data.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn get(&self, q: usize, i: usize) -> Complex64 {
        self.data[(q, i)]
    }

    /// max |ΦΦ† − I|.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = &self.data * self.data.adjoint();
        let id = CMat::identity(self.n(), self.n());
        linalg::max_abs(&(gram - id))
    }

    /// Columns of Φ in the given order (duplicates allowed).
    pub fn columns(&self, cols: &[usize]) -> CMat {
        DMatrix::from_fn(self.n(), cols.len(), |q, k| self.data[(q, cols[k])])
    }

    /// Complex correlation matrix `C_{ij} = ⟨c_i† c_j⟩ = (Φ†Φ)_{ij}` on all sites.
    pub fn correlation(&self) -> CMat {
        // (Φ†Φ)_{ij} = Σ_q conj(Φ_qi) Φ_qj
        self.data.adjoint() * &self.data
    }
}
