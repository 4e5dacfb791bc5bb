//! Command-line front end for `gaussdec`.
//!
//! Exit codes: 0 success, 1 I/O failure while writing, 2 invalid input,
//! 3 covariance not positive definite, 4 inequality check failed,
//! 5 exponent outside the admissible region.

// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod io;
pub mod sweep;

pub use commands::run;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("covariance is not positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("inequality check failed: lhs {lhs} exceeds rhs {rhs} by more than 3 standard errors")]
    CheckFailed { lhs: f64, rhs: f64 },
    #[error("exponent outside the admissible region: {0}")]
    NotInRegion(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Io(_) => 1,
            Self::Invalid(_) => 2,
            Self::NotPositiveDefinite(_) => 3,
            Self::CheckFailed { .. } => 4,
            Self::NotInRegion(_) => 5,
        }
    }
}

impl From<gaussdec::Error> for CliError {
    fn from(e: gaussdec::Error) -> Self {
        use gaussdec::Error as E;
        match e {
            E::NotPositiveDefinite { .. } | E::NonPositiveVariance { .. } => Self::NotPositiveDefinite(e.to_string()),
            E::NotInRegion(_) | E::NotAdmissibleClassical { .. } => Self::NotInRegion(e.to_string()),
            _ => Self::Invalid(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gaussdec", version, about = "Decoupling constants and admissible regions for Gaussian vectors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConstantKind {
    /// Constant on the region `S`.
    New,
    /// Constant under `p ≥ β̄ p(X)`.
    Classical,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Covariance matrix, JSON `{"n", "rows"}` or CSV.
    #[arg(long, short)]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Both decoupling constants at one exponent.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        p: f64,
        /// `β ≥ 1`; `β̄ = max(variance ratio, β)`. Omit for the best `β̄` at `p`.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// The admissible region `S ∩ (1, ∞)`.
    Region {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Determinant bounds for `p I(γ) − C`.
    Bounds {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo check of the decoupling inequality.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        p: f64,
        /// JSON array of test functions, one per coordinate.
        #[arg(long)]
        functions: PathBuf,
        #[arg(long, default_value_t = gaussdec::verify::DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = gaussdec::verify::DEFAULT_NODES)]
        nodes: usize,
        #[arg(long, value_enum, default_value = "new")]
        constant: ConstantKind,
        /// Only with `--constant classical`.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// CSV table over a family parameter and a grid of exponents.
    Sweep {
        /// Sweep description (JSON).
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Generate a covariance matrix from a named family.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Ar1,
    Equicorrelated,
    Toeplitz,
    RandomSpd,
    Diagonal,
    Identity,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, required_unless_present = "spec")]
    pub kind: Option<FamilyKind>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub cond: Option<f64>,
    /// Toeplitz first row, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub values: Vec<f64>,
    /// Diagonal entries, or rescaling of another family, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub variances: Vec<f64>,
    /// Family descriptor (JSON) instead of the flags above.
    #[arg(long, conflicts_with = "kind")]
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}
