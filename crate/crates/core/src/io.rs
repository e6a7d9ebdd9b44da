//! Matrix file formats.
//!
//! JSON: `{"dim": d, "entries": [[re, im], ...]}` with exactly `d²` entries
//! in row-major order.
//!
//! CSV: `d` rows of `2d` numbers, real and imaginary parts interleaved.
//! Blank lines and lines starting with `#` are ignored.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector};

/// Parses either format, choosing by the first non-blank character.
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    if text.trim_start().starts_with('{') {
        parse_matrix_json(text)
    } else {
        parse_matrix_csv(text)
    }
}

pub fn parse_matrix_json(text: &str) -> Result<ComplexMatrix> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::parse("document", "expected a JSON object"))?;
    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::parse("dim", "expected a positive integer"))? as usize;
    if dim == 0 {
        return Err(Error::parse("dim", "dimension must be at least 1"));
    }
    let entries = obj
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse("entries", "expected an array of [re, im] pairs"))?;
    if entries.len() != dim * dim {
        return Err(Error::parse(
            "entries",
            format!(
                "expected {} entries for a {dim}x{dim} matrix, found {}",
                dim * dim,
                entries.len()
            ),
        ));
    }
    let data = entries
        .iter()
        .enumerate()
        .map(|(index, entry)| {
            let location = || format!("entry {index} (row {}, column {})", index / dim, index % dim);
            complex_from_json(entry).map_err(|msg| Error::parse(location(), msg))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComplexMatrix::from_vec_unchecked(dim, data))
}

pub fn parse_matrix_csv(text: &str) -> Result<ComplexMatrix> {
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let values = line
            .split(',')
            .enumerate()
            .map(|(field, raw)| {
                let raw = raw.trim();
                let x: f64 = raw.parse().map_err(|_| {
                    Error::parse(
                        format!("line {}, field {}", line_no + 1, field + 1),
                        format!("`{raw}` is not a number"),
                    )
                })?;
                if !x.is_finite() {
                    return Err(Error::parse(
                        format!("line {}, field {}", line_no + 1, field + 1),
                        "non-finite value",
                    ));
                }
                Ok(x)
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push((line_no + 1, values));
    }
    let dim = rows.len();
    if dim == 0 {
        return Err(Error::parse("document", "no matrix rows found"));
    }
    let mut data = Vec::with_capacity(dim * dim);
    for (row, (line_no, values)) in rows.iter().enumerate() {
        if values.len() != 2 * dim {
            return Err(Error::parse(
                format!("line {line_no} (row {row})"),
                format!(
                    "expected {} values (re, im interleaved) for a {dim}x{dim} matrix, found {}",
                    2 * dim,
                    values.len()
                ),
            ));
        }
        data.extend(values.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])));
    }
    Ok(ComplexMatrix::from_vec_unchecked(dim, data))
}

/// Serializes a matrix in the JSON matrix format.
pub fn matrix_to_json(m: &ComplexMatrix) -> Value {
    json!({
        "dim": m.dim(),
        "entries": m.as_slice().iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
    })
}

pub fn matrix_to_csv(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.dim() {
        let fields: Vec<String> = m
            .row(i)
            .iter()
            .flat_map(|z| [z.re.to_string(), z.im.to_string()])
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Reads `[re, im]` (or a bare real number) as a finite complex scalar.
pub fn complex_from_json(value: &Value) -> std::result::Result<Complex64, String> {
    let (re, im) = match value {
        Value::Number(n) => (n.as_f64(), Some(0.0)),
        Value::Array(parts) if parts.len() == 2 => (parts[0].as_f64(), parts[1].as_f64()),
        _ => return Err("expected [re, im]".into()),
    };
    match (re, im) {
        (Some(re), Some(im)) if re.is_finite() && im.is_finite() => Ok(Complex64::new(re, im)),
        (Some(_), Some(_)) => Err("non-finite value".into()),
        _ => Err("expected numeric [re, im]".into()),
    }
}

pub fn complex_to_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn vector_to_json(v: &ComplexVector) -> Value {
    Value::Array(v.iter().map(|z| complex_to_json(*z)).collect())
}

/// Reads a JSON array of `[re, im]` pairs; `field` names the key in errors.
pub fn vector_from_json(value: &Value, field: &str) -> Result<ComplexVector> {
    let items = value
        .as_array()
        .ok_or_else(|| Error::parse(field, "expected an array of [re, im] pairs"))?;
    let entries = items
        .iter()
        .enumerate()
        .map(|(i, z)| complex_from_json(z).map_err(|msg| Error::parse(format!("{field}[{i}]"), msg)))
        .collect::<Result<Vec<_>>>()?;
    if entries.is_empty() {
        return Err(Error::parse(field, "vector must have at least one entry"));
    }
    Ok(ComplexVector::from_vec_unchecked(entries))
}
