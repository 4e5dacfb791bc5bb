use crate::error::Result;
use crate::matcore::{sym_eigen, Matrix, SymMatrix, DEFAULT_EIGEN_TOL};

/// Gauss–Hermite rule for `E g(Z)`, `Z ~ N(0, 1)` (probabilists' weight).
///
/// Nodes and weights come from the Golub–Welsch eigenproblem: the Jacobi
/// matrix of the monic Hermite recurrence has zero diagonal and `√k` on the
/// off-diagonals; its eigenvalues are the nodes and the squared first
/// eigenvector components are the weights.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n: usize) -> Result<Self> {
        let jacobi = Matrix::from_fn(n, |i, j| {
            if i.abs_diff(j) == 1 {
                (i.max(j) as f64).sqrt()
            } else {
                0.0
            }
        });
        let spec = sym_eigen(&SymMatrix::symmetrize(&jacobi), DEFAULT_EIGEN_TOL)?;
        let weights = (0..n).map(|j| spec.eigenvectors[(0, j)].powi(2)).collect();
        Ok(Self { nodes: spec.eigenvalues, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn expectation(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * g(*x)).sum()
    }

    /// `E[h(Z) exp(−c Z²)]` for `c > −1/2`, computed as
    /// `(1 + 2c)^{−1/2} E[h(Z / √(1 + 2c))]`. Exact for polynomial `h` of
    /// degree below `2 · nodes`, however narrow the Gaussian factor.
    pub fn damped_expectation(&self, c: f64, h: impl Fn(f64) -> f64) -> f64 {
        let scale = (1.0 + 2.0 * c).sqrt();
        self.expectation(|z| h(z / scale)) / scale
    }
}
