//! Matrix ingestion: JSON `{"n": .., "rows": [[..], ..]}` or plain text with
//! `n` on the first line followed by `n` whitespace-separated rows.

use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    n: usize,
    rows: Vec<Vec<f64>>,
}

fn build(n: usize, rows: Vec<Vec<f64>>) -> Result<Matrix<f64>> {
    if n == 0 {
        return Err(Error::Parse("n must be positive".into()));
    }
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!("expected {n} rows of length {n}")));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteEntry("matrix file"));
    }
    Matrix::from_rows(&rows)
}

pub fn parse_matrix_json(src: &str) -> Result<Matrix<f64>> {
    let f: MatrixFile = serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
    build(f.n, f.rows)
}

pub fn parse_matrix_text(src: &str) -> Result<Matrix<f64>> {
    let mut lines = src.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let n: usize = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad dimension line: {e}")))?;
    let mut rows = Vec::with_capacity(n);
    for line in lines {
        let row = line
            .split_whitespace()
            .map(|tok| tok.parse::<f64>().map_err(|e| Error::Parse(format!("{tok:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    build(n, rows)
}

/// Dispatches on the first non-blank character: `{` means JSON.
pub fn parse_matrix(src: &str) -> Result<Matrix<f64>> {
    if src.trim_start().starts_with('{') {
        parse_matrix_json(src)
    } else {
        parse_matrix_text(src)
    }
}

pub fn matrix_to_json(m: &Matrix<f64>) -> String {
    serde_json::to_string(&MatrixFile {
        n: m.rows(),
        rows: m.to_rows(),
    })
    .expect("finite matrix serializes")
}

/// Text form with 17 significant digits per entry.
pub fn matrix_to_text(m: &Matrix<f64>) -> String {
    let mut out = format!("{}\n", m.rows());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
