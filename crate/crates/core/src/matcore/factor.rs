use super::{Matrix, SymMatrix, PIVOT_TOL};
use crate::error::{Error, Result};

/// Cholesky factor `L` of an SPD matrix, `A = L ᵗL`.
#[derive(Clone, Debug, PartialEq)]
pub struct LowerTriangular(Matrix);

impl LowerTriangular {
    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    /// `log det A = 2 Σ log l_ii`.
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.n()).map(|i| self.0[(i, i)].ln()).sum::<f64>()
    }

    pub fn det(&self) -> f64 {
        self.log_det().exp()
    }

    /// `L x` for a lower-triangular `L`.
    pub fn mul_lower(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n();
        for i in 0..n {
            let row = self.0.row(i);
            out[i] = row[..=i].iter().zip(&x[..=i]).map(|(a, b)| a * b).sum();
        }
    }

    /// Solves `A x = b` by forward then backward substitution.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n();
        let l = &self.0;
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] -= l[(i, k)] * y[k];
            }
            y[i] /= l[(i, i)];
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                y[i] -= l[(k, i)] * y[k];
            }
            y[i] /= l[(i, i)];
        }
        y
    }

    /// `A⁻¹`, symmetrized.
    pub fn inverse(&self) -> SymMatrix {
        let n = self.n();
        let mut inv = Matrix::zeros(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            for (i, v) in self.solve(&e).into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        SymMatrix::symmetrize(&inv)
    }
}

/// Cholesky factorization; the SPD test for everything downstream.
pub fn cholesky(a: &SymMatrix) -> Result<LowerTriangular> {
    let n = a.n();
    let threshold = PIVOT_TOL * a.max_abs();
    let mut l = Matrix::zeros(n);
    for j in 0..n {
        let mut pivot = a[(j, j)];
        for k in 0..j {
            pivot -= l[(j, k)] * l[(j, k)];
        }
        if !(pivot > threshold) {
            return Err(Error::NotPositiveDefinite { index: j, pivot });
        }
        let ljj = pivot.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(LowerTriangular(l))
}

/// Signed determinant by LU elimination with partial pivoting.
pub fn lu_det(a: &Matrix) -> f64 {
    let n = a.n();
    let mut m = a.clone();
    let mut det = 1.0;
    for k in 0..n {
        let mut p = k;
        for i in (k + 1)..n {
            if m[(i, k)].abs() > m[(p, k)].abs() {
                p = i;
            }
        }
        if m[(p, k)] == 0.0 {
            return 0.0;
        }
        if p != k {
            for j in 0..n {
                let tmp = m[(k, j)];
                m[(k, j)] = m[(p, j)];
                m[(p, j)] = tmp;
            }
            det = -det;
        }
        let pivot = m[(k, k)];
        det *= pivot;
        for i in (k + 1)..n {
            let f = m[(i, k)] / pivot;
            if f == 0.0 {
                continue;
            }
            for j in (k + 1)..n {
                m[(i, j)] -= f * m[(k, j)];
            }
        }
    }
    det
}

/// QR factorization by Householder reflections, `U_{n-1} … U_1 A = R` and
/// `Q = U_1 … U_{n-1}`.
pub fn householder_qr(a: &Matrix) -> (Matrix, Matrix) {
    let n = a.n();
    let mut r = a.clone();
    let mut q = Matrix::identity(n);

    for k in 0..n.saturating_sub(1) {
        if ((k + 1)..n).all(|i| r[(i, k)] == 0.0) {
            continue;
        }
        let norm = (k..n).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
        let mut v: Vec<f64> = (k..n).map(|i| r[(i, k)]).collect();
        v[0] += if v[0] >= 0.0 { norm } else { -norm };
        let beta = 2.0 / v.iter().map(|x| x * x).sum::<f64>();

        for j in k..n {
            let s = beta * v.iter().enumerate().map(|(i, vi)| vi * r[(k + i, j)]).sum::<f64>();
            for (i, vi) in v.iter().enumerate() {
                r[(k + i, j)] -= s * vi;
            }
        }
        for i in 0..n {
            let s = beta * v.iter().enumerate().map(|(j, vj)| q[(i, k + j)] * vj).sum::<f64>();
            for (j, vj) in v.iter().enumerate() {
                q[(i, k + j)] -= s * vj;
            }
        }
        for i in (k + 1)..n {
            r[(i, k)] = 0.0;
        }
    }
    (q, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn cholesky_examples() {
        let l = cholesky(&SymMatrix::identity(3)).unwrap();
        assert_eq!(l.as_matrix(), &Matrix::identity(3));

        let a = SymMatrix::from_rows(vec![vec![4.0, 2.0], vec![2.0, 2.0]]).unwrap();
        let l = cholesky(&a).unwrap();
        assert_eq!(l.as_matrix(), &m(&[&[2.0, 0.0], &[1.0, 1.0]]));
        assert!((l.det() - 4.0).abs() < 1e-14);

        let bad = SymMatrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(cholesky(&bad), Err(Error::NotPositiveDefinite { index: 1, .. })));

        let singular = SymMatrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(cholesky(&singular).is_err());
    }

    #[test]
    fn cholesky_solve_and_inverse() {
        let a = SymMatrix::from_rows(vec![vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let l = cholesky(&a).unwrap();
        let x = l.solve(&[2.0, 1.0]);
        assert!((4.0 * x[0] + 2.0 * x[1] - 2.0).abs() < 1e-15);
        assert!((2.0 * x[0] + 3.0 * x[1] - 1.0).abs() < 1e-15);
        let prod = a.matmul(&l.inverse());
        assert!(prod.sub(&Matrix::identity(2)).max_abs() < 1e-15);
    }

    #[test]
    fn lu_det_examples() {
        assert_eq!(lu_det(&Matrix::identity(4)), 1.0);
        assert!((lu_det(&m(&[&[1.0, 0.5], &[0.5, 1.0]])) - 0.75).abs() < 1e-15);
        assert_eq!(lu_det(&Matrix::from_diag(&[2.0, 3.0, 4.0])), 24.0);
        assert_eq!(lu_det(&m(&[&[0.0, 1.0], &[1.0, 0.0]])), -1.0);
        assert_eq!(lu_det(&m(&[&[1.0, 1.0], &[1.0, 1.0]])), 0.0);
    }

    #[test]
    fn qr_examples() {
        let (q, r) = householder_qr(&Matrix::identity(3));
        assert_eq!(q, Matrix::identity(3));
        assert_eq!(r, Matrix::identity(3));

        let a = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let (q, r) = householder_qr(&a);
        assert!((r[(0, 0)].abs() - 1.0).abs() < 1e-15);
        assert!((r[(1, 1)].abs() - 1.0).abs() < 1e-15);
        assert_eq!(r[(1, 0)], 0.0);
        // a reflection has determinant -1
        assert!((lu_det(&q) + 1.0).abs() < 1e-15);
        assert!(q.matmul(&r).sub(&a).max_abs() < 1e-15);
    }
}
