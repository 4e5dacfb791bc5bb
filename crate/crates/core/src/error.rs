use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must have at least one row")]
    Empty,
    #[error("matrix rows have inconsistent lengths (expected {expected}, found {found})")]
    NotSquare { expected: usize, found: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },
    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("eigenvalue iteration did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("variance at index {index} is not positive ({value:e})")]
    NonPositiveVariance { index: usize, value: f64 },
    #[error("beta_bar = {0} must exceed 1")]
    DegenerateBeta(f64),
    #[error("p = {p} is below the classical threshold {threshold}")]
    NotAdmissibleClassical { p: f64, threshold: f64 },
    #[error("p = {0} is not in the admissible region")]
    NotInRegion(f64),
    #[error("matrix is not strictly diagonally dominant")]
    NotApplicable,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
