//! Input parsing and the JSON/CSV renderers.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use qradial::asc::SpectralMeasure;
use qradial::grid::GridFunction;
use qradial::spectral::SpectralFunction;
use serde_json::{Map, Number, Value};

use crate::CliError;

/// A float with 17 significant digits; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let text = format!("{x:.16e}");
    Value::Number(text.parse::<Number>().expect("formatted float is a valid JSON number"))
}

pub fn int<T: Into<i64>>(x: T) -> Value {
    Value::from(x.into())
}

pub fn uint(x: usize) -> Value {
    Value::from(x as u64)
}

pub fn cplx(z: Complex64) -> Value {
    let mut m = Map::new();
    m.insert("re".into(), num(z.re));
    m.insert("im".into(), num(z.im));
    Value::Object(m)
}

/// A record table: one header and equally long rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

/// Command output: named scalar fields, optionally followed by a table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub fields: Vec<(&'static str, Value)>,
    pub table: Option<Table>,
}

impl Report {
    pub fn field(mut self, key: &'static str, value: Value) -> Self {
        self.fields.push((key, value));
        self
    }

    pub fn with_table(mut self, name: &'static str, header: Vec<&'static str>, rows: Vec<Vec<Value>>) -> Self {
        self.table = Some(Table { name, header, rows });
        self
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (k, v) in &self.fields {
            m.insert((*k).to_string(), v.clone());
        }
        if let Some(t) = &self.table {
            let rows = t
                .rows
                .iter()
                .map(|r| Value::Object(t.header.iter().map(|h| h.to_string()).zip(r.iter().cloned()).collect()))
                .collect();
            m.insert(t.name.to_string(), Value::Array(rows));
        }
        Value::Object(m)
    }

    /// The table as CSV when there is one, otherwise `key,value` lines.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        match &self.table {
            Some(t) => {
                w.write_record(&t.header)?;
                for r in &t.rows {
                    w.write_record(r.iter().map(cell))?;
                }
            }
            None => {
                w.write_record(["key", "value"])?;
                for (k, v) in &self.fields {
                    w.write_record([k.to_string(), cell(v)])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => other.to_string(),
    }
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>, CliError> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}

fn parse_f64(s: &str, what: &str, line: u64) -> Result<f64, CliError> {
    s.parse().map_err(|_| CliError::Validation(format!("line {line}: {what} {s:?} is not a number")))
}

fn value_columns(rec: &csv::StringRecord, start: usize, line: u64) -> Result<Complex64, CliError> {
    let re = parse_f64(rec.get(start).unwrap_or(""), "real part", line)?;
    let im = match rec.get(start + 1) {
        Some(s) if !s.is_empty() => parse_f64(s, "imaginary part", line)?,
        _ => 0.0,
    };
    Ok(Complex64::new(re, im))
}

/// Reads `k,re[,im]` rows with strictly increasing `k`; a leading header row
/// is skipped.
pub fn read_grid_function(path: &Path) -> Result<GridFunction, CliError> {
    let mut f = GridFunction::zero();
    let mut last: Option<usize> = None;
    for (i, rec) in reader(path)?.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let line = rec.position().map_or(i as u64 + 1, |p| p.line());
        let first = rec.get(0).unwrap_or("");
        let Ok(k) = first.parse::<usize>() else {
            if i == 0 && first.parse::<f64>().is_err() {
                continue;
            }
            return Err(CliError::Validation(format!("line {line}: index {first:?} is not a nonnegative integer")));
        };
        if rec.len() < 2 {
            return Err(CliError::Validation(format!("line {line}: expected k,re[,im]")));
        }
        if last.is_some_and(|p| k <= p) {
            let kind = if last == Some(k) { "duplicate" } else { "decreasing" };
            return Err(CliError::Validation(format!("line {line}: {kind} index {k}")));
        }
        last = Some(k);
        f.set(k, value_columns(&rec, 1, line)?);
    }
    Ok(f)
}

pub fn grid_function_rows(f: &GridFunction) -> Vec<Vec<Value>> {
    f.iter().map(|(k, v)| vec![uint(k), num(v.re), num(v.im)]).collect()
}

/// Rows `type,coord,re,im` with `type` `cont` (coord `z`) or `mass` (coord the index).
pub fn spectral_function_rows(u: &SpectralFunction) -> Vec<Vec<Value>> {
    use qradial::asc::SpectralPoint;
    u.samples()
        .map(|(pt, v)| {
            let (kind, coord) = match pt {
                SpectralPoint::Continuous { z, .. } => ("cont", num(z)),
                SpectralPoint::Mass { index, .. } => ("mass", uint(index)),
            };
            vec![Value::from(kind), coord, num(v.re), num(v.im)]
        })
        .collect()
}

/// Reads rows written by [`spectral_function_rows`]; the nodes must be those of `measure`.
pub fn read_spectral_function(path: &Path, measure: &SpectralMeasure) -> Result<SpectralFunction, CliError> {
    let mut cont = Vec::new();
    let mut masses = Vec::new();
    for (i, rec) in reader(path)?.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let line = rec.position().map_or(i as u64 + 1, |p| p.line());
        match rec.get(0).unwrap_or("") {
            "cont" => {
                let z = parse_f64(rec.get(1).unwrap_or(""), "z", line)?;
                let node = measure.nodes().get(cont.len()).ok_or_else(|| {
                    CliError::Validation(format!("line {line}: more continuous rows than quadrature nodes"))
                })?;
                if (node.z - z).abs() > 1e-12 {
                    return Err(CliError::Validation(format!(
                        "line {line}: z = {z} does not match quadrature node {} (same q, n, m and tol required)",
                        node.z
                    )));
                }
                cont.push(value_columns(&rec, 2, line)?);
            }
            "mass" => {
                let idx = rec.get(1).unwrap_or("");
                if idx.parse::<usize>().ok() != Some(masses.len()) {
                    return Err(CliError::Validation(format!("line {line}: expected mass index {}", masses.len())));
                }
                masses.push(value_columns(&rec, 2, line)?);
            }
            "type" if i == 0 => {}
            other => return Err(CliError::Validation(format!("line {line}: unknown row type {other:?}"))),
        }
    }
    Ok(SpectralFunction::from_values(measure, cont, masses)?)
}

/// Parses `re[,im]`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let mut parts = s.split(',').map(str::trim);
    let re = parts.next().unwrap_or("").parse::<f64>().map_err(|_| format!("{s:?} is not of the form re[,im]"))?;
    let im = match parts.next() {
        Some(t) => t.parse::<f64>().map_err(|_| format!("{s:?} is not of the form re[,im]"))?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(format!("{s:?} has more than two components"));
    }
    Ok(Complex64::new(re, im))
}
