//! Dense real linear algebra: a square matrix type, symmetric eigensolvers,
//! Cholesky, LU determinant and Householder QR.
//!
//! Everything here is written against a plain row-major `Vec<f64>`; the
//! matrices this crate handles are small (covariances of a few dozen
//! coordinates at most), so clarity wins over blocking or SIMD.

mod eigen;
mod factor;

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use eigen::{jacobi_eigen, sym_eigen, Spectrum};
pub use factor::{cholesky, householder_qr, lu_det, LowerTriangular};

/// Relative tolerance for accepting a matrix as symmetric.
pub const SYM_TOL: f64 = 1e-12;
/// Tolerance on `‖ᵗUU − I‖_max` for computed orthogonal factors.
pub const ORTH_TOL: f64 = 1e-10;
/// Tolerance on `‖AU − UΛ‖_max / ‖A‖_max` for computed spectra.
pub const RESID_TOL: f64 = 1e-10;
/// Cholesky pivots at or below `PIVOT_TOL · ‖A‖_max` reject the matrix.
pub const PIVOT_TOL: f64 = 1e-12;
/// Implicit-shift QR sweeps allowed per eigenvalue.
pub const MAX_QR_ITERATIONS: usize = 30;
/// Deflation tolerance used when callers have no better value.
pub const DEFAULT_EIGEN_TOL: f64 = f64::EPSILON;

/// Square matrix of finite reals, stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![1.0; n])
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from rows, rejecting empty, ragged or non-finite input.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare { expected: n, found: row.len() });
            }
            for (j, v) in row.into_iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                data.push(v);
            }
        }
        Ok(Self { n, data })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Matrix) -> Self {
        assert_eq!(self.n, rhs.n, "matmul dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.n, x.len(), "mul_vec dimension mismatch");
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// `⟨A x, x⟩`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        dot(&self.mul_vec(x), x)
    }

    pub fn sub(&self, rhs: &Matrix) -> Self {
        assert_eq!(self.n, rhs.n, "sub dimension mismatch");
        Self {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, rhs: &Matrix) -> Self {
        assert_eq!(self.n, rhs.n, "add dimension mismatch");
        Self {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|a| a * c).collect() }
    }

    /// `I(d) · A · I(d)`.
    pub fn scale_sym(&self, d: &[f64]) -> Self {
        Self::from_fn(self.n, |i, j| d[i] * self[(i, j)] * d[j])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, a| m.max(a.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self[(i, j)] == 0.0))
    }

    /// `‖ᵗM M − I‖_max`.
    pub fn orthogonality_defect(&self) -> f64 {
        self.transpose().matmul(self).sub(&Self::identity(self.n)).max_abs()
    }

    /// Same matrix with rows and columns permuted: `out[i][j] = self[perm[i]][perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        Self::from_fn(self.n, |i, j| self[(perm[i], perm[j])])
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.n.max(1))).finish()
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.to_rows()
    }
}

/// Symmetric matrix. Construction symmetrizes `a_ij ← (a_ij + a_ji)/2` after
/// checking the asymmetry is within `SYM_TOL · (1 + ‖A‖_max)`.
#[derive(Clone, PartialEq, Debug)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        let n = m.n();
        let scale = 1.0 + m.max_abs();
        let mut out = m;
        for i in 0..n {
            for j in (i + 1)..n {
                let gap = (out[(i, j)] - out[(j, i)]).abs();
                if gap > SYM_TOL * scale {
                    return Err(Error::NotSymmetric { row: i, col: j, gap });
                }
                let avg = 0.5 * (out[(i, j)] + out[(j, i)]);
                out[(i, j)] = avg;
                out[(j, i)] = avg;
            }
        }
        Ok(Self(out))
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    /// Symmetrizes unconditionally; for products like `ᵗW K W` that are
    /// symmetric up to rounding.
    pub fn symmetrize(m: &Matrix) -> Self {
        let n = m.n();
        Self(Matrix::from_fn(n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)])))
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        Self(Matrix::from_diag(diag))
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn scale(&self, c: f64) -> Self {
        Self(self.0.scale(c))
    }

    pub fn scale_sym(&self, d: &[f64]) -> Self {
        Self(self.0.scale_sym(d))
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self(self.0.permuted(perm))
    }
}

impl std::ops::Deref for SymMatrix {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.0
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
