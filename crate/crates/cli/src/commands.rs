use gaussdec::bounds::bounds_report;
use gaussdec::covgen::{generate, CovFamily};
use gaussdec::decouple::{
    admissible_region, analyze, beta_bar, optimal_beta_bar, simultaneous_diagonalization, BetaChoice,
    GaussianVector,
};
use gaussdec::verify::{check_inequality, Constant};
use serde::Serialize;

use crate::io::{read_functions, read_matrix, read_text, region_text, to_json, to_text, write_output, MatrixDocument};
use crate::sweep::{run_sweep, SweepSpec};
use crate::{CliError, Command, ConstantKind, FamilyKind, Format, GenArgs, InputArgs};

pub fn run(cli: &crate::Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Analyze { input, p, beta, format, output } => {
            check_beta(*beta)?;
            let x = load(input)?;
            let choice = beta.map_or(BetaChoice::Optimal, BetaChoice::Fixed);
            let report = analyze(&x, *p, choice)?;
            write_output(output.output.as_ref(), &render(&report, *format)?)
        }
        Command::Region { input, format, output } => {
            let x = load(input)?;
            let region = admissible_region(&simultaneous_diagonalization(&x)?.xi);
            let text = match format {
                Format::Text => region_text(&region),
                Format::Json => to_json(&region),
                Format::Csv => return Err(unsupported(*format, "region")),
            };
            write_output(output.output.as_ref(), &text)
        }
        Command::Bounds { input, p, beta, format, output } => {
            check_beta(*beta)?;
            let x = load(input)?;
            check_p(*p)?;
            let bb = match beta {
                Some(b) => Some(beta_bar(&x, *b)?),
                None => optimal_beta_bar(&x, *p).ok(),
            };
            let report = bounds_report(&x, *p, bb);
            write_output(output.output.as_ref(), &render(&report, *format)?)
        }
        Command::Verify { input, p, functions, samples, seed, nodes, constant, beta, format, output } => {
            check_beta(*beta)?;
            let x = load(input)?;
            let fs = read_functions(functions)?;
            let constant = match (constant, beta) {
                (ConstantKind::New, None) => Constant::New,
                (ConstantKind::New, Some(_)) => {
                    return Err(CliError::Invalid("--beta only applies to --constant classical".into()))
                }
                (ConstantKind::Classical, b) => Constant::Classical(b.map_or(BetaChoice::Optimal, BetaChoice::Fixed)),
            };
            let result = check_inequality(&x, &fs, *p, constant, *samples, *seed, *nodes)?;
            write_output(output.output.as_ref(), &render(&result, *format)?)?;
            if result.passed {
                Ok(())
            } else {
                Err(CliError::CheckFailed { lhs: result.lhs_estimate, rhs: result.rhs_bound })
            }
        }
        Command::Sweep { spec, output } => {
            let text = read_text(spec)?;
            let spec: SweepSpec =
                serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("sweep spec: {e}")))?;
            write_output(output.output.as_ref(), &run_sweep(&spec)?)
        }
        Command::Gen(args) => {
            let family = family_from_args(args)?;
            let c = generate(&family)?;
            let text = match args.format {
                Format::Json => to_json(&MatrixDocument::from_matrix(&c)),
                Format::Csv => c
                    .to_rows()
                    .iter()
                    .map(|row| row.iter().map(|v| crate::io::fmt_f64(*v)).collect::<Vec<_>>().join(",") + "\n")
                    .collect(),
                Format::Text => return Err(unsupported(args.format, "gen")),
            };
            write_output(args.output.output.as_ref(), &text)
        }
    }
}

fn load(input: &InputArgs) -> Result<GaussianVector, CliError> {
    let c = read_matrix(&input.input)?;
    log::debug!("read {}x{} covariance from {}", c.n(), c.n(), input.input.display());
    Ok(GaussianVector::from_covariance(c)?)
}

fn check_p(p: f64) -> Result<(), CliError> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(CliError::Invalid(format!("p must be in (1, inf), got {p}")))
    }
}

fn check_beta(beta: Option<f64>) -> Result<(), CliError> {
    match beta {
        Some(b) if !(b >= 1.0 && b.is_finite()) => Err(CliError::Invalid(format!("--beta must be at least 1, got {b}"))),
        _ => Ok(()),
    }
}

fn unsupported(format: Format, cmd: &str) -> CliError {
    CliError::Invalid(format!("format {format:?} is not available for {cmd}"))
}

fn render<T: Serialize>(value: &T, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(to_json(value)),
        Format::Text => Ok(to_text(value)),
        Format::Csv => Err(CliError::Invalid("csv output is only available for gen and sweep".into())),
    }
}

fn family_from_args(args: &GenArgs) -> Result<CovFamily, CliError> {
    if let Some(path) = &args.spec {
        return serde_json::from_str(&read_text(path)?).map_err(|e| CliError::Invalid(format!("family: {e}")));
    }
    let need_n = || args.n.ok_or_else(|| CliError::Invalid("--n is required for this family".into()));
    let need_rho = || args.rho.ok_or_else(|| CliError::Invalid("--rho is required for this family".into()));
    let kind = args.kind.expect("clap requires --kind without --spec");
    let base = match kind {
        FamilyKind::Ar1 => CovFamily::Ar1 { n: need_n()?, rho: need_rho()? },
        FamilyKind::Equicorrelated => CovFamily::Equicorrelated { n: need_n()?, rho: need_rho()? },
        FamilyKind::Toeplitz => CovFamily::Toeplitz { first_row: args.values.clone() },
        FamilyKind::RandomSpd => CovFamily::RandomSpd {
            n: need_n()?,
            seed: args.seed.unwrap_or(0),
            cond: args.cond.unwrap_or(10.0),
        },
        FamilyKind::Identity => CovFamily::Identity { n: need_n()? },
        FamilyKind::Diagonal => return Ok(CovFamily::Diagonal { variances: args.variances.clone() }),
    };
    if args.variances.is_empty() {
        Ok(base)
    } else {
        Ok(CovFamily::Scaled { base: Box::new(base), variances: args.variances.clone() })
    }
}
