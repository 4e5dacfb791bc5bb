//! Parameter sweeps written as CSV.
//!
//! ```json
//! {"family": {"kind": "equicorrelated", "n": 2, "rho": 0.1},
//!  "sweep": {"param": "rho", "start": 0.1, "stop": 0.9, "step": 0.1},
//!  "p_grid": {"start": 1.1, "stop": 5.0, "step": 0.1},
//!  "beta": null}
//! ```
//!
//! `param` names a numeric field of the family; nested fields use dots,
//! e.g. `base.rho` inside a `scaled` family.

use gaussdec::covgen::{generate, CovFamily};
use gaussdec::decouple::{analyze_with, simultaneous_diagonalization, BetaChoice, GaussianVector};
use serde::Deserialize;
use serde_json::Value;

use crate::io::fmt_f64;
use crate::CliError;

pub const HEADER: [&str; 9] = [
    "param",
    "p",
    "in_region_new",
    "q_new",
    "classical_ok",
    "q_old",
    "max_inv_xi",
    "beta_bar_pX",
    "det_identity_residual",
];

const MAX_GRID: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamRange {
    pub param: String,
    #[serde(flatten)]
    pub range: Range,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub family: Value,
    pub sweep: ParamRange,
    pub p_grid: Range,
    #[serde(default)]
    pub beta: Option<f64>,
}

impl Range {
    /// `start + k·step` for `k = 0, 1, …` up to `stop` (inclusive, with a
    /// little slack for rounding in `(stop − start)/step`).
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        let Range { start, stop, step } = *self;
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(CliError::Invalid("grid bounds must be finite".into()));
        }
        if !(step > 0.0) {
            return Err(CliError::Invalid(format!("grid step must be positive, got {step}")));
        }
        if !(start < stop) {
            return Err(CliError::Invalid(format!("grid needs start < stop, got {start} and {stop}")));
        }
        let span = (stop - start) / step;
        if span >= MAX_GRID as f64 {
            return Err(CliError::Invalid(format!("grid has more than {MAX_GRID} points")));
        }
        let count = (span + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|k| start + k as f64 * step).collect())
    }
}

/// Copy of `family` with the dotted field `path` set to `value`.
fn with_param(family: &Value, path: &str, value: f64) -> Result<CovFamily, CliError> {
    let mut fam = family.clone();
    let mut slot = &mut fam;
    for key in path.split('.') {
        slot = slot
            .get_mut(key)
            .ok_or_else(|| CliError::Invalid(format!("family has no field {path:?}")))?;
    }
    *slot = match slot {
        Value::Number(n) if n.is_u64() => {
            if value.fract() != 0.0 || value < 0.0 {
                return Err(CliError::Invalid(format!("{path} must be a nonnegative integer, got {value}")));
            }
            Value::from(value as u64)
        }
        Value::Number(_) => Value::from(value),
        _ => return Err(CliError::Invalid(format!("family field {path:?} is not a number"))),
    };
    serde_json::from_value(fam).map_err(|e| CliError::Invalid(format!("family: {e}")))
}

pub fn run_sweep(spec: &SweepSpec) -> Result<String, CliError> {
    let params = spec.sweep.range.grid()?;
    let ps = spec.p_grid.grid()?;
    if let Some(&p) = ps.iter().find(|p| **p <= 1.0) {
        return Err(CliError::Invalid(format!("p grid must stay above 1, got {p}")));
    }
    let beta = match spec.beta {
        Some(b) => BetaChoice::Fixed(b),
        None => BetaChoice::Optimal,
    };

    let mut out = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Io(e.to_string());
    out.write_record(HEADER).map_err(csv_err)?;
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();

    for &param in &params {
        let family = with_param(&spec.family, &spec.sweep.param, param)?;
        let x = GaussianVector::from_covariance(generate(&family)?)?;
        let sd = simultaneous_diagonalization(&x)?;
        log::info!("sweep {}={param}: max 1/xi = {}", spec.sweep.param, sd.max_inv_xi());
        for &p in &ps {
            let r = analyze_with(&x, &sd, p, beta)?;
            out.write_record([
                fmt_f64(param),
                fmt_f64(p),
                r.in_region.to_string(),
                opt(r.q_new),
                r.q_old.is_some().to_string(),
                opt(r.q_old),
                fmt_f64(r.max_inv_xi),
                opt(r.classical_threshold),
                fmt_f64(r.identity_residual),
            ])
            .map_err(csv_err)?;
        }
    }
    let bytes = out.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV of ASCII fields"))
}
