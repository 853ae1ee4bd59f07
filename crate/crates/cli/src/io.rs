//! Matrix, vector and kernel-grid files.
//!
//! CSV: one matrix row per line, comma-separated decimal literals (scientific
//! notation accepted). JSON: `{"matrix": [[...], ...]}`. Kernel grids:
//! `{"nodes": [...], "weights": [...], "values": [[...], ...]}`.

use std::fs;
use std::path::Path;

use projcone::{ConeVector, KernelGrid, NonnegativeMatrix};
use serde::Deserialize;
use serde_json::json;

use crate::report::{fmt_g17, to_json_string, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Json,
}

impl MatrixFormat {
    /// By extension, falling back to sniffing for a leading `{`.
    pub fn detect(path: &Path, text: &str) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => MatrixFormat::Json,
            Some(e) if e.eq_ignore_ascii_case("csv") => MatrixFormat::Csv,
            _ if text.trim_start().starts_with('{') => MatrixFormat::Json,
            _ => MatrixFormat::Csv,
        }
    }
}

fn parse_entry(field: &str, line: usize, column: usize) -> Result<f64, CliError> {
    let s = field.trim();
    let loc = || json!({ "line": line, "field": column });
    let value: f64 = s
        .parse()
        .map_err(|_| CliError::new("parse", format!("cannot parse {s:?} as a number")).at(loc()))?;
    if value.is_nan() || value.is_infinite() {
        return Err(CliError::new("non_finite", format!("{s:?} is not finite")).at(loc()));
    }
    if value.is_sign_negative() {
        return Err(CliError::new("negative_entry", format!("negative literal {s:?}")).at(loc()));
    }
    Ok(value)
}

/// Rows of comma-separated literals; blank lines are skipped. Not necessarily square.
pub fn parse_csv_rows(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .enumerate()
            .map(|(k, f)| parse_entry(f, n + 1, k + 1))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first().map(Vec::len) {
            if row.len() != first {
                return Err(CliError::new(
                    "not_rectangular",
                    format!("line {} has {} fields, expected {first}", n + 1, row.len()),
                )
                .at(json!({ "line": n + 1 })));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::new("empty", "no data rows"));
    }
    Ok(rows)
}

#[derive(Deserialize)]
struct MatrixDoc {
    matrix: Vec<Vec<f64>>,
}

pub fn parse_json_rows(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let doc: MatrixDoc = serde_json::from_str(text).map_err(|e| {
        CliError::new("parse", e.to_string()).at(json!({ "line": e.line(), "column": e.column() }))
    })?;
    for (i, row) in doc.matrix.iter().enumerate() {
        if let Some(j) = row.iter().position(|v| v.is_sign_negative()) {
            return Err(CliError::new("negative_entry", format!("negative entry {}", row[j]))
                .at(json!({ "row": i, "col": j })));
        }
    }
    if doc.matrix.is_empty() {
        return Err(CliError::new("empty", "no data rows"));
    }
    Ok(doc.matrix)
}

pub fn parse_rows(text: &str, format: MatrixFormat) -> Result<Vec<Vec<f64>>, CliError> {
    match format {
        MatrixFormat::Csv => parse_csv_rows(text),
        MatrixFormat::Json => parse_json_rows(text),
    }
}

pub fn parse_matrix(text: &str, format: MatrixFormat) -> Result<NonnegativeMatrix, CliError> {
    Ok(NonnegativeMatrix::from_rows(parse_rows(text, format)?)?)
}

pub fn write_csv(m: &NonnegativeMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.dim() {
        let line: Vec<String> = m.row(i).iter().map(|&v| fmt_g17(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn write_json(m: &NonnegativeMatrix) -> String {
    to_json_string(&json!({ "matrix": m.to_rows() }), 0)
}

pub fn write_matrix(m: &NonnegativeMatrix, format: MatrixFormat) -> String {
    match format {
        MatrixFormat::Csv => write_csv(m),
        MatrixFormat::Json => write_json(m),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| {
        CliError::new("io", format!("{}: {e}", path.display())).at(json!({ "path": path.display().to_string() }))
    })
}

pub fn load_matrix(path: &Path) -> Result<NonnegativeMatrix, CliError> {
    let text = read(path)?;
    parse_matrix(&text, MatrixFormat::detect(path, &text))
}

/// A file holding exactly two rows of equal length.
pub fn load_vector_pair(path: &Path) -> Result<(ConeVector, ConeVector), CliError> {
    let text = read(path)?;
    let mut rows = parse_rows(&text, MatrixFormat::detect(path, &text))?;
    if rows.len() != 2 {
        return Err(CliError::new(
            "parse",
            format!("expected two rows, found {}", rows.len()),
        ));
    }
    let g = rows.pop().expect("two rows");
    let f = rows.pop().expect("two rows");
    Ok((ConeVector::new(f)?, ConeVector::new(g)?))
}

/// `"1,2.5,3e-2"` to a cone vector.
pub fn parse_vector(literal: &str) -> Result<ConeVector, CliError> {
    let entries = literal
        .split(',')
        .enumerate()
        .map(|(k, f)| parse_entry(f, 1, k + 1))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ConeVector::new(entries)?)
}

pub fn parse_kernel_grid(text: &str) -> Result<KernelGrid, CliError> {
    serde_json::from_str(text).map_err(|e| {
        let code = if e.is_data() { "invalid_grid" } else { "parse" };
        CliError::new(code, e.to_string()).at(json!({ "line": e.line(), "column": e.column() }))
    })
}

pub fn load_kernel_grid(path: &Path) -> Result<KernelGrid, CliError> {
    parse_kernel_grid(&read(path)?)
}
