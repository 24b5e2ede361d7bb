//! File formats: Matrix Market for `A`, JSON for the spectrum, CSV or JSON
//! for dense `W` / `H`.
//!
//! Exact rationals are always written as `"n/d"` strings, including integers
//! (`"1/1"`), so that readers never have to guess. Eigenvector entries are
//! written as JSON integers of arbitrary size.

use std::io::{BufRead, Write};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Number, Value};

use crate::error::{Error, Result};
use crate::oracle::DenseExactMatrix;
use crate::spectra::{EigenVectorX, SparseIncidence, SpectralSystem};
use crate::words::{AlphabetProfile, Word};

/// Default number of significant digits in float exports.
pub const DEFAULT_FLOAT_DIGITS: usize = 15;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NumberFormat {
    #[default]
    Exact,
    Float { digits: usize },
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// `A` as a coordinate pattern matrix with 1-based indices. The profile and
/// `k` travel in a comment line so the file can be read back on its own.
pub fn write_matrix_market<W: Write>(a: &SparseIncidence, mut out: W) -> Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate pattern general")?;
    writeln!(out, "% profile {} k {}", a.profile.to_json(), a.k)?;
    writeln!(out, "{} {} {}", a.n_rows, a.n_cols, a.nnz())?;
    for &(r, c) in &a.entries {
        writeln!(out, "{} {}", r + 1, c + 1)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_matrix_market<R: BufRead>(input: R) -> Result<SparseIncidence> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| parse_err("empty Matrix Market file"))??;
    let h = header.to_ascii_lowercase();
    if !h.starts_with("%%matrixmarket matrix coordinate pattern") {
        return Err(parse_err(format!("unsupported Matrix Market header: {header}")));
    }
    let mut meta: Option<(AlphabetProfile, usize)> = None;
    let mut dims: Option<(usize, usize, usize)> = None;
    let mut entries = Vec::new();
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(c) = t.strip_prefix('%') {
            if let Some(rest) = c.trim().strip_prefix("profile ") {
                let (p, k) = rest
                    .rsplit_once(" k ")
                    .ok_or_else(|| parse_err(format!("bad profile comment: {t}")))?;
                let k = k.trim().parse().map_err(|_| parse_err(format!("bad k in: {t}")))?;
                meta = Some((AlphabetProfile::parse(p.trim())?, k));
            }
            continue;
        }
        let nums: Vec<usize> = t
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| parse_err(format!("bad integer in line: {t}"))))
            .collect::<Result<_>>()?;
        match (dims, nums.as_slice()) {
            (None, &[r, c, n]) => {
                dims = Some((r, c, n));
                entries.reserve(n);
            }
            (Some((nr, nc, _)), &[r, c]) => {
                if r == 0 || c == 0 || r > nr || c > nc {
                    return Err(parse_err(format!("entry ({r}, {c}) outside {nr}x{nc}")));
                }
                entries.push((r - 1, c - 1));
            }
            _ => return Err(parse_err(format!("unexpected line: {t}"))),
        }
    }
    let (n_rows, n_cols, nnz) = dims.ok_or_else(|| parse_err("missing size line"))?;
    if entries.len() != nnz {
        return Err(parse_err(format!("expected {nnz} entries, found {}", entries.len())));
    }
    let (profile, k) = meta.ok_or_else(|| parse_err("missing profile comment"))?;
    entries.sort_unstable();
    Ok(SparseIncidence {
        profile,
        k,
        n_rows,
        n_cols,
        entries,
    })
}

fn big_number(x: &BigInt) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("integer literal"))
}

fn value_to_bigint(v: &Value) -> Result<BigInt> {
    let s = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(parse_err(format!("expected an integer, found {v}"))),
    };
    BigInt::from_str(&s).map_err(|_| parse_err(format!("expected an integer, found {s}")))
}

pub fn system_to_json(system: &SpectralSystem) -> Value {
    let p = &system.profile;
    let pairs: Vec<&EigenVectorX> = system.eigenpairs.iter().collect();
    json!({
        "profile": p.sizes(),
        "k": system.k,
        "labels": pairs.iter().map(|e| p.format_word(&e.label)).collect::<Vec<_>>(),
        "eigenvalues": pairs.iter().map(|e| e.eigenvalue.to_string()).collect::<Vec<_>>(),
        "norms_sq": pairs.iter().map(|e| e.norm_sq.to_string()).collect::<Vec<_>>(),
        "vectors": pairs
            .iter()
            .map(|e| Value::Array(e.entries.iter().map(big_number).collect()))
            .collect::<Vec<_>>(),
    })
}

pub fn write_system_json<W: Write>(system: &SpectralSystem, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, &system_to_json(system))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name).ok_or_else(|| parse_err(format!("missing field {name:?}")))
}

fn array<'a>(v: &'a Value, name: &str) -> Result<&'a Vec<Value>> {
    field(v, name)?
        .as_array()
        .ok_or_else(|| parse_err(format!("field {name:?} is not an array")))
}

pub fn system_from_json(v: &Value) -> Result<SpectralSystem> {
    let profile: AlphabetProfile = serde_json::from_value(field(v, "profile")?.clone())?;
    let k = field(v, "k")?
        .as_u64()
        .ok_or_else(|| parse_err("field \"k\" is not an integer"))? as usize;
    let labels = array(v, "labels")?;
    let eigenvalues = array(v, "eigenvalues")?;
    let norms = array(v, "norms_sq")?;
    let vectors = array(v, "vectors")?;
    let n = labels.len();
    if eigenvalues.len() != n || norms.len() != n || vectors.len() != n {
        return Err(parse_err("labels, eigenvalues, norms_sq and vectors differ in length"));
    }
    let mut eigenpairs = Vec::with_capacity(n);
    for i in 0..n {
        let label = labels[i]
            .as_str()
            .ok_or_else(|| parse_err("label is not a string"))?;
        let entries = vectors[i]
            .as_array()
            .ok_or_else(|| parse_err("vector is not an array"))?
            .iter()
            .map(value_to_bigint)
            .collect::<Result<Vec<_>>>()?;
        eigenpairs.push(EigenVectorX {
            label: profile.parse_word(label)?,
            entries,
            eigenvalue: value_to_bigint(&eigenvalues[i])?,
            norm_sq: value_to_bigint(&norms[i])?,
        });
    }
    Ok(SpectralSystem {
        profile,
        k,
        eigenpairs,
    })
}

pub fn read_system_json<R: std::io::Read>(input: R) -> Result<SpectralSystem> {
    let v: Value = serde_json::from_reader(input)?;
    system_from_json(&v)
}

/// `n/d` with `d > 0`, also for integers.
pub fn format_rational(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || parse_err(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// A float with `digits` significant digits, in plain notation when the
/// exponent is moderate and scientific notation otherwise.
pub fn format_float(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i64;
    if exp < -5 || exp >= digits as i64 {
        return format!("{:.*e}", digits - 1, x);
    }
    let decimals = (digits as i64 - 1 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn format_value(x: &BigRational, format: NumberFormat) -> String {
    match format {
        NumberFormat::Exact => format_rational(x),
        NumberFormat::Float { digits } => format_float(x.to_f64().unwrap_or(f64::NAN), digits),
    }
}

fn check_labels(m: &DenseExactMatrix, rows: &[String], cols: &[String]) -> Result<()> {
    if rows.len() != m.rows() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: rows.len(),
        });
    }
    if cols.len() != m.cols() {
        return Err(Error::DimensionMismatch {
            expected: m.cols(),
            found: cols.len(),
        });
    }
    Ok(())
}

/// CSV with a header of column labels and the row label in the first field.
pub fn write_matrix_csv<W: Write>(
    m: &DenseExactMatrix,
    row_labels: &[String],
    col_labels: &[String],
    format: NumberFormat,
    out: W,
) -> Result<()> {
    check_labels(m, row_labels, col_labels)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(std::iter::once("word").chain(col_labels.iter().map(String::as_str)))
        .map_err(csv_err)?;
    for (r, label) in row_labels.iter().enumerate() {
        let fields = m.row(r).iter().map(|x| format_value(x, format));
        w.write_record(std::iter::once(label.clone()).chain(fields))
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => parse_err(format!("{other:?}")),
        }
    } else {
        parse_err(e.to_string())
    }
}

/// A labelled exact matrix read back from CSV or JSON.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledMatrix {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub matrix: DenseExactMatrix,
}

pub fn read_matrix_csv<R: std::io::Read>(input: R) -> Result<LabelledMatrix> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let col_labels: Vec<String> = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .skip(1)
        .map(str::to_string)
        .collect();
    let mut row_labels = Vec::new();
    let mut entries = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        let mut fields = record.iter();
        row_labels.push(fields.next().unwrap_or_default().to_string());
        let row: Vec<BigRational> = fields.map(parse_rational).collect::<Result<_>>()?;
        if row.len() != col_labels.len() {
            return Err(Error::DimensionMismatch {
                expected: col_labels.len(),
                found: row.len(),
            });
        }
        entries.extend(row);
    }
    let matrix = DenseExactMatrix::new(row_labels.len(), col_labels.len(), entries)?;
    Ok(LabelledMatrix {
        row_labels,
        col_labels,
        matrix,
    })
}

/// `{rows, cols, entries}` with entries as a list of rows.
pub fn matrix_to_json(
    m: &DenseExactMatrix,
    row_labels: &[String],
    col_labels: &[String],
    format: NumberFormat,
) -> Result<Value> {
    check_labels(m, row_labels, col_labels)?;
    let entries: Vec<Value> = (0..m.rows())
        .map(|r| {
            Value::Array(
                m.row(r)
                    .iter()
                    .map(|x| match format {
                        NumberFormat::Exact => Value::String(format_rational(x)),
                        NumberFormat::Float { digits } => {
                            let s = format_float(x.to_f64().unwrap_or(f64::NAN), digits);
                            Number::from_str(&s).map(Value::Number).unwrap_or(Value::String(s))
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    Ok(json!({ "rows": row_labels, "cols": col_labels, "entries": entries }))
}

pub fn write_matrix_json<W: Write>(
    m: &DenseExactMatrix,
    row_labels: &[String],
    col_labels: &[String],
    format: NumberFormat,
    mut out: W,
) -> Result<()> {
    serde_json::to_writer(&mut out, &matrix_to_json(m, row_labels, col_labels, format)?)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn read_matrix_json<R: std::io::Read>(input: R) -> Result<LabelledMatrix> {
    let v: Value = serde_json::from_reader(input)?;
    let labels = |name: &str| -> Result<Vec<String>> {
        array(&v, name)?
            .iter()
            .map(|x| x.as_str().map(str::to_string).ok_or_else(|| parse_err("label is not a string")))
            .collect()
    };
    let row_labels = labels("rows")?;
    let col_labels = labels("cols")?;
    let mut entries = Vec::with_capacity(row_labels.len() * col_labels.len());
    for row in array(&v, "entries")? {
        let row = row.as_array().ok_or_else(|| parse_err("matrix row is not an array"))?;
        if row.len() != col_labels.len() {
            return Err(Error::DimensionMismatch {
                expected: col_labels.len(),
                found: row.len(),
            });
        }
        for x in row {
            let s = match x {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                _ => return Err(parse_err(format!("bad matrix entry {x}"))),
            };
            entries.push(parse_rational(&s)?);
        }
    }
    let matrix = DenseExactMatrix::new(row_labels.len(), col_labels.len(), entries)?;
    Ok(LabelledMatrix {
        row_labels,
        col_labels,
        matrix,
    })
}

/// Labels of a word list in the profile's compact notation.
pub fn word_labels(profile: &AlphabetProfile, words: &[Word]) -> Vec<String> {
    words.iter().map(|w| profile.format_word(w)).collect()
}
