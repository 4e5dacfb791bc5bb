//! Decoupling constants for a centered Gaussian vector.
//!
//! Two admissible regions are computed for the exponent `p`:
//!
//! * the classical one, `p ≥ β̄ p(X)`, with `p(X)` the decoupling
//!   coefficient and the constant from [`q_old`];
//! * the region `S` driven by the simultaneous diagonalization
//!   `R = U D V` of `C` and `I(γ)`, with the constant from [`q_new`].
//!
//! The exact identity `det(p I(γ) − C) = pⁿ ∏σᵢ² ∏(1 − 1/(p ξᵢ))` ties the
//! two together and is checked by [`det_identity_residual`].

mod region;
mod simdiag;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{cholesky, lu_det, LowerTriangular, Matrix, SymMatrix};

pub use region::{admissible_region, region_margin, AdmissibleRegion, Breakpoint, Interval, MERGE_TOL};
pub use simdiag::{correlation_eigs_oracle, simultaneous_diagonalization, SimDiag};

/// Smallest gap above 1 accepted for `β̄` when it is chosen automatically.
pub const BETA_GAP: f64 = 1e-6;

/// Relative slack on `p ≥ β̄ p(X)` so that `β̄ = p / p(X)` passes after rounding.
const CLASSICAL_SLACK: f64 = 1e-12;

/// Validated covariance of a centered Gaussian vector.
#[derive(Clone, Debug)]
pub struct GaussianVector {
    cov: SymMatrix,
    gamma: Vec<f64>,
    sigma: Vec<f64>,
    chol: LowerTriangular,
}

impl GaussianVector {
    pub fn from_covariance(c: SymMatrix) -> Result<Self> {
        let gamma = c.diagonal();
        if let Some((index, &value)) = gamma.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::NonPositiveVariance { index, value });
        }
        let chol = cholesky(&c)?;
        let sigma = gamma.iter().map(|g| g.sqrt()).collect();
        Ok(Self { cov: c, gamma, sigma, chol })
    }

    pub fn n(&self) -> usize {
        self.gamma.len()
    }

    pub fn covariance(&self) -> &SymMatrix {
        &self.cov
    }

    /// `γ = (σ₁², …, σₙ²)`.
    pub fn variances(&self) -> &[f64] {
        &self.gamma
    }

    pub fn std_devs(&self) -> &[f64] {
        &self.sigma
    }

    pub fn cholesky(&self) -> &LowerTriangular {
        &self.chol
    }

    pub fn log_det(&self) -> f64 {
        self.chol.log_det()
    }

    /// `max σᵢ² / min σᵢ²`.
    pub fn variance_ratio(&self) -> f64 {
        let max = self.gamma.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.gamma.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }

    /// `p I(γ) − C`.
    pub fn shifted(&self, p: f64) -> Matrix {
        Matrix::from_diag(&self.gamma).scale(p).sub(&self.cov)
    }

    /// Coordinates relabelled by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        Self::from_covariance(self.cov.permuted(perm))
    }
}

/// `p(X) = maxᵢ Σⱼ |C_ij| / C_ii`, the sum including `j = i`.
pub fn decoupling_coefficient(x: &GaussianVector) -> f64 {
    let c = x.covariance();
    (0..x.n())
        .map(|i| c.row(i).iter().map(|v| v.abs()).sum::<f64>() / c[(i, i)])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `β̄ = (max σᵢ² / min σᵢ²) ∨ β`, required to exceed 1.
pub fn beta_bar(x: &GaussianVector, beta: f64) -> Result<f64> {
    if !(beta >= 1.0) {
        return Err(Error::InvalidParameter(format!("beta must be >= 1, got {beta}")));
    }
    let bb = x.variance_ratio().max(beta);
    if bb <= 1.0 {
        return Err(Error::DegenerateBeta(bb));
    }
    Ok(bb)
}

/// Lower end of the admissible `β̄`: the variance ratio, kept strictly above 1.
fn beta_floor(x: &GaussianVector) -> f64 {
    x.variance_ratio().max(1.0 + BETA_GAP)
}

/// The `β̄` giving the smallest classical constant at `p`: the constant
/// decreases in `β̄` and the condition `p ≥ β̄ p(X)` caps it at `p / p(X)`.
pub fn optimal_beta_bar(x: &GaussianVector, p: f64) -> Result<f64> {
    let p_x = decoupling_coefficient(x);
    let floor = beta_floor(x);
    let candidate = p / p_x;
    if candidate >= floor {
        Ok(candidate)
    } else {
        Err(Error::NotAdmissibleClassical { p, threshold: floor * p_x })
    }
}

/// Rejects `(p, β̄)` outside the classical hypotheses.
pub(crate) fn check_classical(x: &GaussianVector, p: f64, beta_bar: f64) -> Result<()> {
    if !(beta_bar > 1.0) {
        return Err(Error::DegenerateBeta(beta_bar));
    }
    let ratio = x.variance_ratio();
    if beta_bar < ratio * (1.0 - CLASSICAL_SLACK) {
        return Err(Error::InvalidParameter(format!(
            "beta_bar = {beta_bar} is below the variance ratio {ratio}"
        )));
    }
    let threshold = beta_bar * decoupling_coefficient(x);
    if !(p >= threshold * (1.0 - CLASSICAL_SLACK)) {
        return Err(Error::NotAdmissibleClassical { p, threshold });
    }
    Ok(())
}

/// Classical constant
/// `(∏σᵢ)^{1/p} / [(1 − 1/β̄)^{(n/2)(1−1/p)} det(C)^{1/(2p)}]`, valid for
/// `p ≥ β̄ p(X)`.
pub fn q_old(x: &GaussianVector, p: f64, beta_bar: f64) -> Result<f64> {
    check_classical(x, p, beta_bar)?;
    let n = x.n() as f64;
    let log_sigma: f64 = x.std_devs().iter().map(|s| s.ln()).sum();
    let ln_q = log_sigma / p
        - 0.5 * n * (1.0 - 1.0 / p) * (1.0 - 1.0 / beta_bar).ln()
        - x.log_det() / (2.0 * p);
    Ok(ln_q.exp())
}

/// Constant for `p ∈ S`:
/// `(∏σᵢ)^{1/p} det(C)^{-1/(2p)} (∏ⱼ |1 − 1/(p ξⱼ)|)^{-(1−1/p)/2}`.
pub fn q_new(x: &GaussianVector, p: f64) -> Result<f64> {
    let sd = simultaneous_diagonalization(x)?;
    q_new_with(x, &sd, p)
}

/// [`q_new`] with a precomputed diagonalization.
pub fn q_new_with(x: &GaussianVector, sd: &SimDiag, p: f64) -> Result<f64> {
    let region = admissible_region(&sd.xi);
    if !region.contains(p) {
        return Err(Error::NotInRegion(p));
    }
    let log_sigma: f64 = x.std_devs().iter().map(|s| s.ln()).sum();
    let log_prod: f64 = sd.xi.iter().map(|xi| (1.0 - 1.0 / (p * xi)).abs().ln()).sum();
    let ln_q = log_sigma / p - x.log_det() / (2.0 * p) - 0.5 * (1.0 - 1.0 / p) * log_prod;
    Ok(ln_q.exp())
}

/// `pⁿ ∏σᵢ² ∏(1 − 1/(p ξᵢ))`, the closed form of `det(p I(γ) − C)`.
pub fn det_shifted_closed_form(x: &GaussianVector, sd: &SimDiag, p: f64) -> f64 {
    x.variances()
        .iter()
        .zip(&sd.xi)
        .map(|(g, xi)| p * g * (1.0 - 1.0 / (p * xi)))
        .product()
}

/// Relative gap between `det(p I(γ) − C)` by elimination and its closed form.
pub fn det_identity_residual(x: &GaussianVector, p: f64) -> Result<f64> {
    let sd = simultaneous_diagonalization(x)?;
    Ok(det_identity_residual_with(x, &sd, p))
}

pub fn det_identity_residual_with(x: &GaussianVector, sd: &SimDiag, p: f64) -> f64 {
    let lhs = lu_det(&x.shifted(p));
    let rhs = det_shifted_closed_form(x, sd, p);
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}

/// `B = C⁻¹ − (1/p) I(γ⁻¹)`.
pub fn b_matrix(x: &GaussianVector, p: f64) -> Result<SymMatrix> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("p must be positive, got {p}")));
    }
    let inv = x.cholesky().inverse();
    let shift: Vec<f64> = x.variances().iter().map(|g| 1.0 / (p * g)).collect();
    Ok(SymMatrix::symmetrize(&inv.sub(&Matrix::from_diag(&shift))))
}

/// How `β̄` is picked for the classical constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BetaChoice {
    /// `β̄ = variance ratio ∨ β`.
    Fixed(f64),
    /// [`optimal_beta_bar`].
    Optimal,
}

/// Both theorems evaluated at one `p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecouplingReport {
    pub n: usize,
    pub p: f64,
    #[serde(rename = "p_of_X")]
    pub p_of_x: f64,
    pub beta_bar: Option<f64>,
    /// `β̄ p(X)` when `β̄` is defined.
    pub classical_threshold: Option<f64>,
    pub q_old: Option<f64>,
    pub in_region: bool,
    pub q_new: Option<f64>,
    pub b_positive_definite: bool,
    pub max_inv_xi: f64,
    pub breakpoints: Vec<f64>,
    pub identity_residual: f64,
    /// Why `q_old` is absent, if it is.
    pub classical_note: Option<String>,
}

pub fn analyze(x: &GaussianVector, p: f64, beta: BetaChoice) -> Result<DecouplingReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("p must be in (1, inf), got {p}")));
    }
    let sd = simultaneous_diagonalization(x)?;
    analyze_with(x, &sd, p, beta)
}

/// [`analyze`] reusing a diagonalization, for sweeps over `p`.
pub fn analyze_with(x: &GaussianVector, sd: &SimDiag, p: f64, beta: BetaChoice) -> Result<DecouplingReport> {
    let p_of_x = decoupling_coefficient(x);

    let bb = match beta {
        BetaChoice::Fixed(b) => beta_bar(x, b),
        BetaChoice::Optimal => optimal_beta_bar(x, p).or_else(|e| match e {
            // report the smallest admissible β̄ so the threshold stays visible
            Error::NotAdmissibleClassical { .. } => Ok(beta_floor(x)),
            other => Err(other),
        }),
    };
    let (beta_bar, q_old, note) = match bb {
        Ok(bb) => match q_old(x, p, bb) {
            Ok(q) => (Some(bb), Some(q), None),
            Err(e) => (Some(bb), None, Some(e.to_string())),
        },
        Err(e @ (Error::DegenerateBeta(_) | Error::InvalidParameter(_))) => (None, None, Some(e.to_string())),
        Err(e) => return Err(e),
    };

    let region = admissible_region(&sd.xi);
    let in_region = region.contains(p);
    let q_new = if in_region { Some(q_new_with(x, sd, p)?) } else { None };

    Ok(DecouplingReport {
        n: x.n(),
        p,
        p_of_x,
        beta_bar,
        classical_threshold: beta_bar.map(|b| b * p_of_x),
        q_old,
        in_region,
        q_new,
        b_positive_definite: sd.xi.iter().all(|xi| p * xi > 1.0),
        max_inv_xi: sd.max_inv_xi(),
        breakpoints: region.breakpoints,
        identity_residual: det_identity_residual_with(x, sd, p),
        classical_note: note,
    })
}
