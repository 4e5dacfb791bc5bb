//! Symmetric eigensolvers.
//!
//! [`sym_eigen`] is the production path: Householder reduction to
//! tridiagonal form followed by implicit Wilkinson-shift QR sweeps made of
//! Givens rotations. [`jacobi_eigen`] is the cyclic Jacobi method, slower but
//! independent, and is kept to cross-check the QR path.

use super::{Matrix, SymMatrix, MAX_QR_ITERATIONS};
use crate::error::{Error, Result};

const MAX_JACOBI_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Matrix,
}

impl Spectrum {
    /// `‖A U − U I(μ)‖_max`.
    pub fn residual(&self, a: &Matrix) -> f64 {
        let au = a.matmul(&self.eigenvectors);
        let n = a.n();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let r = au[(i, j)] - self.eigenvectors[(i, j)] * self.eigenvalues[j];
                worst = worst.max(r.abs());
            }
        }
        worst
    }

    /// Sorts ascending and flips each eigenvector so that its first
    /// component of largest magnitude is nonnegative.
    fn normalize(eigenvalues: Vec<f64>, vectors: Matrix) -> Self {
        let n = eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));

        let mut out = Matrix::zeros(n);
        for (dst, &src) in order.iter().enumerate() {
            let col = vectors.column(src);
            let mut pivot = 0;
            for (i, v) in col.iter().enumerate() {
                if v.abs() > col[pivot].abs() {
                    pivot = i;
                }
            }
            let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
            for (i, v) in col.iter().enumerate() {
                out[(i, dst)] = sign * v;
            }
        }
        Self {
            eigenvalues: order.iter().map(|&i| eigenvalues[i]).collect(),
            eigenvectors: out,
        }
    }
}

/// Householder reduction `A = Q T ᵗQ`. Returns the diagonal and
/// superdiagonal of `T` along with `Q`.
fn tridiagonalize(a: &SymMatrix) -> (Vec<f64>, Vec<f64>, Matrix) {
    let n = a.n();
    let mut t = a.as_matrix().clone();
    let mut q = Matrix::identity(n);

    for k in 0..n.saturating_sub(2) {
        let x: Vec<f64> = ((k + 1)..n).map(|i| t[(i, k)]).collect();
        if x[1..].iter().all(|v| *v == 0.0) {
            continue;
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut v = x;
        v[0] += if v[0] >= 0.0 { norm } else { -norm };
        let vtv: f64 = v.iter().map(|e| e * e).sum();
        let beta = 2.0 / vtv;

        // T <- H T
        for j in 0..n {
            let s: f64 = v.iter().enumerate().map(|(i, vi)| vi * t[(k + 1 + i, j)]).sum();
            let s = beta * s;
            for (i, vi) in v.iter().enumerate() {
                t[(k + 1 + i, j)] -= s * vi;
            }
        }
        // T <- T H, Q <- Q H
        for m in [&mut t, &mut q] {
            for i in 0..n {
                let s: f64 = v.iter().enumerate().map(|(j, vj)| m[(i, k + 1 + j)] * vj).sum();
                let s = beta * s;
                for (j, vj) in v.iter().enumerate() {
                    m[(i, k + 1 + j)] -= s * vj;
                }
            }
        }
    }

    let d = (0..n).map(|i| t[(i, i)]).collect();
    let e = (0..n.saturating_sub(1)).map(|i| 0.5 * (t[(i, i + 1)] + t[(i + 1, i)])).collect();
    (d, e, q)
}

/// Eigen-decomposition of a symmetric matrix by Householder
/// tridiagonalization and implicit-shift QR.
///
/// `tol` is the relative deflation threshold: an off-diagonal `e_i` is
/// treated as zero once `|e_i| ≤ tol · (|d_i| + |d_{i+1}|)`. Non-positive
/// values fall back to machine epsilon.
pub fn sym_eigen(a: &SymMatrix, tol: f64) -> Result<Spectrum> {
    let tol = if tol > 0.0 { tol } else { f64::EPSILON };
    let n = a.n();
    let (mut d, mut e, mut q) = tridiagonalize(a);

    let negligible = |d: &[f64], e: &[f64], i: usize| {
        e[i].abs() <= tol * (d[i].abs() + d[i + 1].abs()) || e[i].abs() < f64::MIN_POSITIVE
    };

    let mut m = n.saturating_sub(1);
    while m > 0 {
        let mut iterations = 0;
        loop {
            if negligible(&d, &e, m - 1) {
                e[m - 1] = 0.0;
                break;
            }
            let mut l = m - 1;
            while l > 0 && !negligible(&d, &e, l - 1) {
                l -= 1;
            }
            if l > 0 {
                e[l - 1] = 0.0;
            }
            iterations += 1;
            if iterations > MAX_QR_ITERATIONS {
                return Err(Error::NonConvergence { iterations: MAX_QR_ITERATIONS });
            }
            implicit_qr_step(&mut d, &mut e, &mut q, l, m);
        }
        m -= 1;
    }

    Ok(Spectrum::normalize(d, q))
}

/// One Wilkinson-shifted QR sweep on the unreduced block `l..=m`, chasing
/// the bulge down with Givens rotations and accumulating them into `q`.
fn implicit_qr_step(d: &mut [f64], e: &mut [f64], q: &mut Matrix, l: usize, m: usize) {
    let delta = 0.5 * (d[m - 1] - d[m]);
    let b = e[m - 1];
    let sign = if delta >= 0.0 { 1.0 } else { -1.0 };
    let shift = d[m] - b * b / (delta + sign * delta.hypot(b));

    let mut x = d[l] - shift;
    let mut z = e[l];
    let n = q.n();
    for k in l..m {
        let r = x.hypot(z);
        let (c, s) = if r == 0.0 { (1.0, 0.0) } else { (x / r, -z / r) };
        if k > l {
            e[k - 1] = r;
        }

        let (a, bk, cc) = (d[k], e[k], d[k + 1]);
        d[k] = c * c * a - 2.0 * c * s * bk + s * s * cc;
        d[k + 1] = s * s * a + 2.0 * c * s * bk + c * c * cc;
        e[k] = c * s * (a - cc) + (c * c - s * s) * bk;

        if k + 1 < m {
            z = -s * e[k + 1];
            e[k + 1] *= c;
            x = e[k];
        }

        for i in 0..n {
            let qk = q[(i, k)];
            let qk1 = q[(i, k + 1)];
            q[(i, k)] = c * qk - s * qk1;
            q[(i, k + 1)] = s * qk + c * qk1;
        }
    }
}

/// Cyclic Jacobi eigen-decomposition. Stops once the off-diagonal Frobenius
/// norm drops to `tol` times the full Frobenius norm.
pub fn jacobi_eigen(a: &SymMatrix, tol: f64) -> Result<Spectrum> {
    let tol = if tol > 0.0 { tol } else { f64::EPSILON };
    let n = a.n();
    let mut w = a.as_matrix().clone();
    let mut v = Matrix::identity(n);
    let frob = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| a[(i, j)] * a[(i, j)])
        .sum::<f64>()
        .sqrt();

    let off_norm = |w: &Matrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * w[(i, j)] * w[(i, j)];
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&w) > tol * frob {
        sweeps += 1;
        if sweeps > MAX_JACOBI_SWEEPS {
            return Err(Error::NonConvergence { iterations: MAX_JACOBI_SWEEPS });
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = w[(p, r)];
                if apr == 0.0 {
                    continue;
                }
                let theta = (w[(r, r)] - w[(p, p)]) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;

                for k in 0..n {
                    let wkp = w[(k, p)];
                    let wkr = w[(k, r)];
                    w[(k, p)] = c * wkp - s * wkr;
                    w[(k, r)] = s * wkp + c * wkr;
                }
                for k in 0..n {
                    let wpk = w[(p, k)];
                    let wrk = w[(r, k)];
                    w[(p, k)] = c * wpk - s * wrk;
                    w[(r, k)] = s * wpk + c * wrk;
                }
                w[(p, r)] = 0.0;
                w[(r, p)] = 0.0;

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkr = v[(k, r)];
                    v[(k, p)] = c * vkp - s * vkr;
                    v[(k, r)] = s * vkp + c * vkr;
                }
            }
        }
    }

    Ok(Spectrum::normalize(w.diagonal(), v))
}
