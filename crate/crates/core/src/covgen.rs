//! Deterministic covariance generators used by tests, sweeps and the CLI.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{cholesky, sym_eigen, Matrix, SymMatrix, DEFAULT_EIGEN_TOL};

/// A named family of covariance matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CovFamily {
    /// `C_ij = ρ^|i−j|`.
    Ar1 { n: usize, rho: f64 },
    /// Unit diagonal, `ρ` everywhere else.
    Equicorrelated { n: usize, rho: f64 },
    /// `C_ij = first_row[|i−j|]`.
    Toeplitz { first_row: Vec<f64> },
    /// Random eigenvectors with eigenvalues spread log-uniformly on `[1, cond]`.
    RandomSpd { n: usize, seed: u64, cond: f64 },
    Diagonal { variances: Vec<f64> },
    Identity { n: usize },
    /// `I(√v) · base · I(√v)`.
    Scaled { base: Box<CovFamily>, variances: Vec<f64> },
}

impl CovFamily {
    pub fn dimension(&self) -> usize {
        match self {
            Self::Ar1 { n, .. } | Self::Equicorrelated { n, .. } => *n,
            Self::RandomSpd { n, .. } | Self::Identity { n } => *n,
            Self::Toeplitz { first_row } => first_row.len(),
            Self::Diagonal { variances } => variances.len(),
            Self::Scaled { base, .. } => base.dimension(),
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

/// Builds the matrix for `fam`. The result always passes the SPD check.
pub fn generate(fam: &CovFamily) -> Result<SymMatrix> {
    let n = fam.dimension();
    if n == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let c = match fam {
        CovFamily::Ar1 { rho, .. } => {
            if !(rho.abs() < 1.0) {
                return Err(invalid(format!("AR(1) requires |rho| < 1, got {rho}")));
            }
            SymMatrix::new(Matrix::from_fn(n, |i, j| rho.powi(i.abs_diff(j) as i32)))?
        }
        CovFamily::Equicorrelated { rho, .. } => {
            let lower = if n > 1 { -1.0 / (n as f64 - 1.0) } else { -1.0 };
            if !(rho.abs() < 1.0 && *rho > lower) {
                return Err(invalid(format!(
                    "equicorrelated n={n} requires {lower} < rho < 1, got {rho}"
                )));
            }
            SymMatrix::new(Matrix::from_fn(n, |i, j| if i == j { 1.0 } else { *rho }))?
        }
        CovFamily::Toeplitz { first_row } => {
            let m = Matrix::from_rows(
                (0..n).map(|i| (0..n).map(|j| first_row[i.abs_diff(j)]).collect()).collect(),
            )?;
            SymMatrix::new(m)?
        }
        CovFamily::RandomSpd { seed, cond, .. } => random_spd(n, *seed, *cond)?,
        CovFamily::Diagonal { variances } => {
            if let Some(v) = variances.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                return Err(invalid(format!("variances must be positive, got {v}")));
            }
            SymMatrix::from_diag(variances)
        }
        CovFamily::Identity { .. } => SymMatrix::identity(n),
        CovFamily::Scaled { base, variances } => {
            let inner = generate(base)?;
            if variances.len() != n {
                return Err(Error::DimensionMismatch(variances.len(), n));
            }
            if let Some(v) = variances.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                return Err(invalid(format!("variances must be positive, got {v}")));
            }
            let root: Vec<f64> = variances.iter().map(|v| v.sqrt()).collect();
            inner.scale_sym(&root)
        }
    };
    cholesky(&c).map_err(|_| invalid(format!("{fam:?} does not yield a positive definite matrix")))?;
    Ok(c)
}

/// `ᵗG G + εI` supplies a random orthonormal basis; its spectrum is then
/// replaced by `cond^{t_k}`, `t_k` the normalized rank of the k-th eigenvalue
/// on a log scale, so the condition number equals `cond` up to rounding.
fn random_spd(n: usize, seed: u64, cond: f64) -> Result<SymMatrix> {
    if !(cond >= 1.0 && cond.is_finite()) {
        return Err(invalid(format!("condition number must be >= 1, got {cond}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = StandardNormal.sample(&mut rng);
        }
    }
    let gram = g.transpose().matmul(&g);
    let eps = 1e-8 * gram.max_abs();
    let gram = SymMatrix::symmetrize(&gram.add(&Matrix::identity(n).scale(eps)));
    let spec = sym_eigen(&gram, DEFAULT_EIGEN_TOL)?;

    let lo = spec.eigenvalues[0].ln();
    let hi = spec.eigenvalues[n - 1].ln();
    let target: Vec<f64> = spec
        .eigenvalues
        .iter()
        .map(|l| {
            let t = if hi > lo { (l.ln() - lo) / (hi - lo) } else { 0.0 };
            cond.powf(t)
        })
        .collect();
    let u = &spec.eigenvectors;
    let c = Matrix::from_fn(n, |i, j| (0..n).map(|k| u[(i, k)] * target[k] * u[(j, k)]).sum());
    Ok(SymMatrix::symmetrize(&c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_families() {
        let c = generate(&CovFamily::Equicorrelated { n: 2, rho: 0.5 }).unwrap();
        assert_eq!(c.to_rows(), vec![vec![1.0, 0.5], vec![0.5, 1.0]]);
        let c = generate(&CovFamily::Ar1 { n: 3, rho: 0.5 }).unwrap();
        assert_eq!(
            c.to_rows(),
            vec![vec![1.0, 0.5, 0.25], vec![0.5, 1.0, 0.5], vec![0.25, 0.5, 1.0]]
        );
        let c = generate(&CovFamily::Toeplitz { first_row: vec![2.0, 0.5, 0.1] }).unwrap();
        assert_eq!(c[(2, 0)], 0.1);
        let c = generate(&CovFamily::Scaled {
            base: Box::new(CovFamily::Identity { n: 2 }),
            variances: vec![4.0, 9.0],
        })
        .unwrap();
        assert_eq!(c.diagonal(), vec![4.0, 9.0]);
    }

    #[test]
    fn invalid_parameters() {
        // SPD threshold for equicorrelated is rho > -1/(n-1) = -0.5
        assert!(matches!(
            generate(&CovFamily::Equicorrelated { n: 3, rho: -0.6 }),
            Err(Error::InvalidParameter(_))
        ));
        assert!(generate(&CovFamily::Equicorrelated { n: 3, rho: -0.4 }).is_ok());
        assert!(generate(&CovFamily::Ar1 { n: 3, rho: 1.0 }).is_err());
        assert!(generate(&CovFamily::Toeplitz { first_row: vec![1.0, 2.0] }).is_err());
        assert!(generate(&CovFamily::Diagonal { variances: vec![1.0, 0.0] }).is_err());
        assert!(generate(&CovFamily::RandomSpd { n: 3, seed: 1, cond: 0.5 }).is_err());
        assert!(generate(&CovFamily::Identity { n: 0 }).is_err());
    }

    #[test]
    fn random_spd_is_deterministic_and_conditioned() {
        for n in [1usize, 2, 5, 16, 32] {
            let fam = CovFamily::RandomSpd { n, seed: 7, cond: 100.0 };
            let a = generate(&fam).unwrap();
            assert_eq!(a, generate(&fam).unwrap());
            let s = sym_eigen(&a, 0.0).unwrap();
            let k = s.eigenvalues[n - 1] / s.eigenvalues[0];
            if n > 1 {
                assert!((k / 100.0 - 1.0).abs() < 0.1, "n={n} cond={k}");
            }
        }
    }

    #[test]
    fn family_round_trips_through_json_shape() {
        let fam = CovFamily::Scaled {
            base: Box::new(CovFamily::Ar1 { n: 2, rho: 0.3 }),
            variances: vec![1.0, 2.0],
        };
        // serde derive only; the JSON crate lives in the CLI
        assert_eq!(fam.dimension(), 2);
    }
}
