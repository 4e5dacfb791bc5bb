use crate::error::Result;
use crate::matcore::{jacobi_eigen, sym_eigen, Matrix, SymMatrix, DEFAULT_EIGEN_TOL};

use super::GaussianVector;

/// Simultaneous diagonalization of the pencil `(C, I(γ))`:
/// `ᵗR C R = I` and `ᵗR I(γ) R = I(ξ)` with `R = U D V`.
///
/// Columns are ordered so that `ξ` is ascending (`1/ξ` descending). The
/// pencil `(C, p·I(γ))` has eigenvalues `λ_j = p·ξ_j`; use [`SimDiag::lambda`].
#[derive(Clone, Debug)]
pub struct SimDiag {
    /// Orthonormal eigenvectors of `C`.
    pub u: Matrix,
    /// Eigenvalues of `C`, ascending.
    pub mu: Vec<f64>,
    /// Diagonal of `D = I(μ^{-1/2})`.
    pub d: Vec<f64>,
    /// `ᵗD ᵗU I(γ) U D`.
    pub h: SymMatrix,
    /// Orthonormal eigenvectors of `H`.
    pub v: Matrix,
    pub r: Matrix,
    /// Rayleigh quotients `⟨I(γ) r^j, r^j⟩ / ⟨C r^j, r^j⟩`.
    pub xi: Vec<f64>,
}

impl SimDiag {
    pub fn n(&self) -> usize {
        self.xi.len()
    }

    /// Breakpoints `1/ξ_j`, descending.
    pub fn inv_xi(&self) -> Vec<f64> {
        self.xi.iter().map(|x| 1.0 / x).collect()
    }

    pub fn max_inv_xi(&self) -> f64 {
        self.inv_xi().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `λ_j = p ξ_j`, the pencil eigenvalues for `K = p I(γ)`.
    pub fn lambda(&self, p: f64) -> Vec<f64> {
        self.xi.iter().map(|x| p * x).collect()
    }

    pub fn d_matrix(&self) -> Matrix {
        Matrix::from_diag(&self.d)
    }

    /// `(‖ᵗRCR − I‖_max, ‖ᵗR I(γ) R − I(ξ)‖_max)`.
    pub fn defects(&self, x: &GaussianVector) -> (f64, f64) {
        let rt = self.r.transpose();
        let m = rt.matmul(x.covariance()).matmul(&self.r);
        let k = rt.matmul(&Matrix::from_diag(x.variances())).matmul(&self.r);
        (
            m.sub(&Matrix::identity(self.n())).max_abs(),
            k.sub(&Matrix::from_diag(&self.xi)).max_abs(),
        )
    }
}

/// Builds `R = U D V` following the two-stage reduction: whiten `C` with its
/// eigenbasis, then diagonalize the transformed `I(γ)`.
pub fn simultaneous_diagonalization(x: &GaussianVector) -> Result<SimDiag> {
    let n = x.n();
    let c = x.covariance();
    let spec_c = sym_eigen(c, DEFAULT_EIGEN_TOL)?;
    let u = spec_c.eigenvectors;
    let mu = spec_c.eigenvalues;
    let d: Vec<f64> = mu.iter().map(|m| 1.0 / m.sqrt()).collect();

    let gamma = x.variances();
    let utgu = Matrix::from_fn(n, |i, j| (0..n).map(|k| u[(k, i)] * gamma[k] * u[(k, j)]).sum());
    let h = SymMatrix::symmetrize(&utgu.scale_sym(&d));

    let spec_h = sym_eigen(&h, DEFAULT_EIGEN_TOL)?;
    let r_unsorted = u.matmul(&Matrix::from_diag(&d)).matmul(&spec_h.eigenvectors);

    let gamma_mat = Matrix::from_diag(gamma);
    let rayleigh: Vec<f64> = (0..n)
        .map(|j| {
            let col = r_unsorted.column(j);
            gamma_mat.quadratic_form(&col) / c.quadratic_form(&col)
        })
        .collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| rayleigh[a].total_cmp(&rayleigh[b]));
    let reorder = |m: &Matrix| Matrix::from_fn(n, |i, j| m[(i, order[j])]);

    Ok(SimDiag {
        r: reorder(&r_unsorted),
        v: reorder(&spec_h.eigenvectors),
        xi: order.iter().map(|&j| rayleigh[j]).collect(),
        u,
        mu,
        d,
        h,
    })
}

/// Eigenvalues of the correlation matrix `I(γ^{-1/2}) C I(γ^{-1/2})`,
/// descending. These are the generalized eigenvalues of `(C, I(γ))` and so
/// must reproduce `{1/ξ_j}` without going through `R`.
pub fn correlation_eigs_oracle(x: &GaussianVector) -> Result<Vec<f64>> {
    let scale: Vec<f64> = x.std_devs().iter().map(|s| 1.0 / s).collect();
    let corr = x.covariance().scale_sym(&scale);
    let mut eig = jacobi_eigen(&corr, DEFAULT_EIGEN_TOL)?.eigenvalues;
    eig.reverse();
    Ok(eig)
}
