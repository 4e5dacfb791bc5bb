//! Reading matrices and function lists, writing reports.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use gaussdec::decouple::AdmissibleRegion;
use gaussdec::matcore::SymMatrix;
use gaussdec::verify::TestFunction;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::CliError;

/// `{"n": 2, "rows": [[1, 0.5], [0.5, 1]]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub n: usize,
    pub rows: Vec<Vec<f64>>,
}

impl MatrixDocument {
    pub fn from_matrix(m: &SymMatrix) -> Self {
        Self { n: m.n(), rows: m.to_rows() }
    }

    pub fn into_matrix(self) -> Result<SymMatrix, CliError> {
        if self.rows.len() != self.n {
            return Err(CliError::Invalid(format!("n = {} but {} rows given", self.n, self.rows.len())));
        }
        Ok(SymMatrix::from_rows(self.rows)?)
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))
}

/// JSON when the file starts with `{`, otherwise CSV with one matrix row per line.
pub fn read_matrix(path: &Path) -> Result<SymMatrix, CliError> {
    let text = read_text(path)?;
    if text.trim_start().starts_with('{') {
        let doc: MatrixDocument = serde_json::from_str(&text)
            .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        doc.into_matrix()
    } else {
        parse_matrix_csv(&text).map_err(|e| match e {
            CliError::Invalid(msg) => CliError::Invalid(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}

pub fn parse_matrix_csv(text: &str) -> Result<SymMatrix, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Invalid(e.to_string()))?;
        let row = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .map_err(|_| CliError::Invalid(format!("row {}: not a number: {field:?}", line + 1)))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    Ok(SymMatrix::from_rows(rows)?)
}

pub fn read_functions(path: &Path) -> Result<Vec<TestFunction>, CliError> {
    let text = read_text(path)?;
    let fs: Vec<TestFunction> =
        serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    for f in &fs {
        f.validate()?;
    }
    Ok(fs)
}

pub fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}"))),
    }
}

/// 17 significant digits, enough to round-trip any double.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// `v` rounded to 12 significant digits, shortest form.
pub fn fmt_sig12(v: f64) -> String {
    if !v.is_finite() {
        return if v > 0.0 { "∞".into() } else { fmt_f64(v) };
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

/// Pretty JSON whose floats carry 17 significant digits.
struct PreciseFormatter(PrettyFormatter<'static>);

impl Formatter for PreciseFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_f64(v).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, PreciseFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report types serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

/// `key: value` lines for a flat report; nested values stay JSON.
pub fn to_text<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report types serialize");
    let mut out = String::new();
    match v {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                out.push_str(&format!("{k}: {}\n", render_scalar(&v)));
            }
        }
        other => out.push_str(&format!("{}\n", render_scalar(&other))),
    }
    out
}

fn render_scalar(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Null => "-".into(),
        serde_json::Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => u.to_string(),
            (_, Some(i), _) => i.to_string(),
            (_, _, Some(f)) => fmt_f64(f),
            _ => n.to_string(),
        },
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Bool(b) => b.to_string(),
        nested => nested.to_string(),
    }
}

/// `(1, 1.5) excluded; (1.5, ∞) admissible`
pub fn region_text(region: &AdmissibleRegion) -> String {
    let parts: Vec<String> = region
        .intervals
        .iter()
        .map(|iv| {
            let tag = if iv.admissible { "admissible" } else { "excluded" };
            format!("({}, {}) {tag}", fmt_sig12(iv.lower), fmt_sig12(iv.upper))
        })
        .collect();
    format!("{}\n", parts.join("; "))
}
