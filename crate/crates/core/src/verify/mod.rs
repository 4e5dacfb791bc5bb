//! Empirical side: Brascamp–Lieb closed forms, marginal `p`-norms of test
//! functions, Monte Carlo estimates of `E ∏ fᵢ(Xᵢ)` and the end-to-end
//! comparison against the decoupling bound.

mod mc;
mod quadrature;

use serde::{Deserialize, Serialize};
use libm::{erfc, lgamma as ln_gamma};

use crate::decouple::{optimal_beta_bar, q_new, q_old, BetaChoice, GaussianVector};
use crate::error::{Error, Result};
use crate::matcore::{cholesky, Matrix, SymMatrix};

pub use mc::{mc_expectation, McEstimate, CHUNK_SAMPLES, MIN_SAMPLES};
pub use quadrature::GaussHermite;

pub const DEFAULT_NODES: usize = 64;
pub const MIN_NODES: usize = 16;
pub const DEFAULT_SAMPLES: usize = 1_000_000;
/// Pass if `lhs ≤ rhs + PASS_SIGMAS · stderr`.
pub const PASS_SIGMAS: f64 = 3.0;

/// Nonnegative test functions on the real line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum TestFunction {
    /// `1_{[a, b]}(x)`; either end may be infinite.
    #[serde(rename = "indicator")]
    Indicator {
        #[serde(with = "crate::serde_ext")]
        a: f64,
        #[serde(with = "crate::serde_ext")]
        b: f64,
    },
    /// `exp(−x²/s)`.
    #[serde(rename = "gaussbump", alias = "gauss_bump")]
    GaussBump { s: f64 },
    /// `|x|^k exp(−x²/s)`.
    #[serde(rename = "polygauss", alias = "poly_gauss")]
    PolyGauss { k: u32, s: f64 },
}

impl TestFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Indicator { a, b } if !(a < b) => {
                Err(Error::InvalidParameter(format!("indicator needs a < b, got [{a}, {b}]")))
            }
            Self::GaussBump { s } | Self::PolyGauss { s, .. } if !(s > 0.0 && s.is_finite()) => {
                Err(Error::InvalidParameter(format!("bump width must be positive, got {s}")))
            }
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::Indicator { a, b } => {
                if a <= x && x <= b {
                    1.0
                } else {
                    0.0
                }
            }
            Self::GaussBump { s } => (-x * x / s).exp(),
            Self::PolyGauss { k, s } => x.abs().powi(k as i32) * (-x * x / s).exp(),
        }
    }
}

/// `Φ(b) − Φ(a)` for the standard normal, using upper tails on the right
/// half-line so that far-tail intervals keep their relative accuracy.
pub fn normal_interval_prob(a: f64, b: f64) -> f64 {
    let upper = |x: f64| 0.5 * erfc(x / std::f64::consts::SQRT_2);
    if a >= 0.0 {
        upper(a) - upper(b)
    } else if b <= 0.0 {
        upper(-b) - upper(-a)
    } else {
        1.0 - upper(b) - upper(-a)
    }
}

/// `(E |f(σZ)|^p)^{1/p}` for `Z ~ N(0, 1)`.
///
/// Indicators use the exact normal CDF. `PolyGauss` uses the exact Gamma
/// moment since `|x|^{kp}` has a kink at the origin unless `kp` is an even
/// integer. `GaussBump` goes through Gauss–Hermite with `nodes` points, with
/// the factor `exp(−pσ²Z²/s)` folded into the weight.
pub fn marginal_pnorm(f: &TestFunction, sigma: f64, p: f64, nodes: usize) -> Result<f64> {
    f.validate()?;
    if !(p >= 1.0) || !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("need p >= 1 and sigma > 0, got p={p}, sigma={sigma}")));
    }
    let moment = match *f {
        TestFunction::Indicator { a, b } => normal_interval_prob(a / sigma, b / sigma),
        TestFunction::PolyGauss { k, s } => poly_gauss_moment(k, s, sigma, p),
        TestFunction::GaussBump { s } => {
            if nodes < MIN_NODES {
                return Err(Error::InvalidParameter(format!("need at least {MIN_NODES} nodes, got {nodes}")));
            }
            GaussHermite::new(nodes)?.damped_expectation(p * sigma * sigma / s, |_| 1.0)
        }
    };
    Ok(moment.powf(1.0 / p))
}

/// `E[|σZ|^{kp} e^{−pσ²Z²/s}] = σ^{kp} 2^{kp/2} Γ((kp+1)/2) / √π · (1 + 2pσ²/s)^{−(kp+1)/2}`.
fn poly_gauss_moment(k: u32, s: f64, sigma: f64, p: f64) -> f64 {
    let a = k as f64 * p;
    let q = p * sigma * sigma / s;
    let ln = a * sigma.ln() + 0.5 * a * std::f64::consts::LN_2 + ln_gamma(0.5 * (a + 1.0))
        - 0.5 * std::f64::consts::PI.ln()
        - 0.5 * (a + 1.0) * (1.0 + 2.0 * q).ln();
    ln.exp()
}

/// Integrand ratio of the Brascamp–Lieb constant at Gaussian inputs
/// `gᵢ(x) = exp(−bᵢ x²/2)`:
/// `(2π)^{(n/2)(1−1/p)} p^{n/(2p)} ∏ bᵢ^{1/(2p)} / det(A + I(b))^{1/2}`.
pub fn bl_ratio(a: &SymMatrix, b: &[f64], p: f64) -> Result<f64> {
    let n = a.n();
    if b.len() != n {
        return Err(Error::DimensionMismatch(b.len(), n));
    }
    if !(p >= 1.0) || b.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParameter("need p >= 1 and b > 0".into()));
    }
    cholesky(a)?;
    let shifted = SymMatrix::symmetrize(&a.add(&Matrix::from_diag(b)));
    let log_det = cholesky(&shifted)?.log_det();
    let nf = n as f64;
    let ln = 0.5 * nf * (1.0 - 1.0 / p) * (2.0 * std::f64::consts::PI).ln()
        + nf / (2.0 * p) * p.ln()
        + b.iter().map(|v| v.ln()).sum::<f64>() / (2.0 * p)
        - 0.5 * log_det;
    Ok(ln.exp())
}

/// Upper bound `(2π)^{(n/2)(1−1/p)} / det(A)^{(1/2)(1−1/p)}` on the
/// supremum of [`bl_ratio`] over `b`.
pub fn bl_bound(a: &SymMatrix, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("need p >= 1, got {p}")));
    }
    let log_det = cholesky(a)?.log_det();
    let e = 0.5 * (1.0 - 1.0 / p);
    Ok((e * a.n() as f64 * (2.0 * std::f64::consts::PI).ln() - e * log_det).exp())
}

/// Which decoupling constant the right-hand side uses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Constant {
    /// `q_new`, requires `p ∈ S`.
    New,
    /// `q_old` with `β̄` chosen as given, requires `p ≥ β̄ p(X)`.
    Classical(BetaChoice),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationResult {
    pub p: f64,
    pub constant: f64,
    pub norms_product: f64,
    pub lhs_estimate: f64,
    pub lhs_stderr: f64,
    pub rhs_bound: f64,
    /// `(rhs − lhs) / stderr`; infinite when the estimate has no spread.
    #[serde(with = "crate::serde_ext")]
    pub margin_sigmas: f64,
    pub samples: usize,
    pub seed: u64,
    pub passed: bool,
}

/// Estimates `E ∏ fᵢ(Xᵢ)` and compares it with `Q · ∏ ‖fᵢ(Xᵢ)‖_p`.
pub fn check_inequality(
    x: &GaussianVector,
    fs: &[TestFunction],
    p: f64,
    constant: Constant,
    samples: usize,
    seed: u64,
    nodes: usize,
) -> Result<VerificationResult> {
    if fs.len() != x.n() {
        return Err(Error::DimensionMismatch(fs.len(), x.n()));
    }
    let q = match constant {
        Constant::New => q_new(x, p)?,
        Constant::Classical(BetaChoice::Optimal) => q_old(x, p, optimal_beta_bar(x, p)?)?,
        Constant::Classical(BetaChoice::Fixed(beta)) => q_old(x, p, crate::decouple::beta_bar(x, beta)?)?,
    };
    let norms_product = fs
        .iter()
        .zip(x.std_devs())
        .map(|(f, &s)| marginal_pnorm(f, s, p, nodes))
        .product::<Result<f64>>()?;
    let est = mc_expectation(x, fs, samples, seed)?;
    let rhs = q * norms_product;
    let margin_sigmas = if est.stderr > 0.0 {
        (rhs - est.mean) / est.stderr
    } else if rhs >= est.mean {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    };
    Ok(VerificationResult {
        p,
        constant: q,
        norms_product,
        lhs_estimate: est.mean,
        lhs_stderr: est.stderr,
        rhs_bound: rhs,
        margin_sigmas,
        samples: est.samples,
        seed,
        passed: est.mean <= rhs + PASS_SIGMAS * est.stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn bl_ratio_examples() {
        let a = SymMatrix::identity(1);
        let expect = (2.0 * PI).powf(0.25) * 2f64.powf(0.25) / 2f64.sqrt();
        assert!(close(bl_ratio(&a, &[1.0], 2.0).unwrap(), expect, 1e-14));
        let a = SymMatrix::identity(2);
        let expect = (2.0 * PI).sqrt() * 2f64.sqrt() / 2.0;
        assert!(close(bl_ratio(&a, &[1.0, 1.0], 2.0).unwrap(), expect, 1e-14));
        let bad = SymMatrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(bl_ratio(&bad, &[1.0, 1.0], 2.0), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn bl_bound_examples() {
        for n in 1..4 {
            let b = bl_bound(&SymMatrix::identity(n), 2.0).unwrap();
            assert!(close(b, (2.0 * PI).powf(n as f64 / 4.0), 1e-14));
        }
        let a = SymMatrix::from_rows(vec![vec![3.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert_eq!(bl_bound(&a, 1.0).unwrap(), 1.0);
        let d = SymMatrix::from_diag(&[2.0, 2.0]);
        assert!(close(bl_bound(&d, 2.0).unwrap(), (2.0 * PI).sqrt() / 2f64.sqrt(), 1e-14));
    }

    #[test]
    fn marginal_pnorm_examples() {
        let half = TestFunction::Indicator { a: 0.0, b: f64::INFINITY };
        for (sigma, p) in [(1.0, 2.0), (3.0, 1.5), (0.2, 7.0)] {
            let v = marginal_pnorm(&half, sigma, p, 64).unwrap();
            assert!(close(v, 0.5f64.powf(1.0 / p), 1e-15));
        }
        // E e^{−2Z²} = (1 + 4)^{−1/2}
        let bump = TestFunction::GaussBump { s: 1.0 };
        assert!(close(marginal_pnorm(&bump, 1.0, 2.0, 64).unwrap(), 5f64.powf(-0.25), 1e-13));
        // Φ(1) − Φ(−1) = erf(1/√2)
        let ind = TestFunction::Indicator { a: -1.0, b: 1.0 };
        let expect = libm::erf(1.0 / 2f64.sqrt());
        assert!(close(marginal_pnorm(&ind, 1.0, 1.0, 64).unwrap(), expect, 1e-15));
    }

    #[test]
    fn poly_gauss_closed_form_matches_quadrature_when_smooth() {
        // k p even: the integrand is a polynomial times a Gaussian
        let gh = GaussHermite::new(64).unwrap();
        for (k, s, sigma, p) in [(2u32, 1.0, 1.0, 1.0), (1, 2.0, 0.7, 2.0), (3, 0.5, 1.3, 2.0), (2, 3.0, 2.0, 3.0)] {
            let c = p * sigma * sigma / s;
            let kp = (k as f64 * p) as i32;
            let quad = gh.damped_expectation(c, |z| (sigma * z).powi(kp));
            let exact = poly_gauss_moment(k, s, sigma, p);
            assert!(close(quad, exact, 1e-11), "k={k} quad={quad} exact={exact}");
        }
    }

    #[test]
    fn quadrature_node_count_insensitive_on_bumps() {
        for s in [0.5, 1.0, 4.0] {
            for p in [1.0, 2.5, 4.0] {
                let f = TestFunction::GaussBump { s };
                let a = marginal_pnorm(&f, 1.0, p, 64).unwrap();
                let b = marginal_pnorm(&f, 1.0, p, 128).unwrap();
                assert!(close(a, b, 1e-10), "s={s} p={p}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn test_function_validation() {
        assert!(TestFunction::Indicator { a: 1.0, b: 1.0 }.validate().is_err());
        assert!(TestFunction::GaussBump { s: 0.0 }.validate().is_err());
        assert!(TestFunction::PolyGauss { k: 2, s: -1.0 }.validate().is_err());
        assert!(marginal_pnorm(&TestFunction::GaussBump { s: 1.0 }, 1.0, 2.0, 8).is_err());
    }

    #[test]
    fn normal_interval_tails() {
        assert!(close(normal_interval_prob(f64::NEG_INFINITY, f64::INFINITY), 1.0, 1e-16));
        assert!(close(normal_interval_prob(0.0, f64::INFINITY), 0.5, 1e-16));
        // upper tail at 10 sigma
        assert!(close(normal_interval_prob(10.0, f64::INFINITY), 7.619853024160527e-24, 1e-12));
        assert!(close(normal_interval_prob(f64::NEG_INFINITY, -10.0), 7.619853024160527e-24, 1e-12));
    }
}
