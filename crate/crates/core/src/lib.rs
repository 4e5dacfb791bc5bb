//! Decoupling inequalities for finite centered Gaussian vectors.
//!
//! Given a covariance matrix `C`, this crate computes the exponent regions
//! in which `E ∏ fᵢ(Xᵢ) ≤ Q(X, p) ∏ ‖fᵢ(Xᵢ)‖_p` holds with an explicit
//! constant, the constants themselves, the determinant bounds behind them,
//! and Monte Carlo checks of the inequality.
//!
//! * [`matcore`]: dense symmetric eigensolvers, Cholesky, LU, Householder QR.
//! * [`decouple`]: `p(X)`, `β̄`, the `R = U D V` construction, the region `S`
//!   and both constants.
//! * [`bounds`]: diagonal dominance, Ostrowski and Taussky tests.
//! * [`verify`]: Brascamp–Lieb closed forms, marginal norms, Monte Carlo.
//! * [`covgen`]: covariance families for tests and sweeps.

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod covgen;
pub mod decouple;
pub mod error;
pub mod matcore;
pub mod serde_ext;
pub mod verify;

pub use error::{Error, Result};
