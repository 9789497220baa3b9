//! JSON encodings of matrices and octonions as arrays of scalar strings.

use serde_json::Value;
use thiserror::Error;

use crate::linalg::Matrix;
use crate::octonion::Octonion;
use crate::scalar::{ParseScalarError, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("expected a {rows}×{cols} array of arrays")]
    Shape { rows: usize, cols: usize },
    #[error("entry ({row}, {col}): {source}")]
    Entry {
        row: usize,
        col: usize,
        source: ParseScalarError,
    },
}

fn scalar_of<S: Scalar>(v: &Value) -> Option<Result<S, ParseScalarError>> {
    match v {
        Value::String(s) => Some(S::parse_scalar(s)),
        // Bare JSON numbers are accepted and read through their text form.
        Value::Number(n) => Some(S::parse_scalar(&n.to_string())),
        _ => None,
    }
}

/// Row-major `rows × cols` matrix. Entries may be strings such as `"3/5"`
/// or plain JSON numbers.
pub fn parse_matrix_json<S: Scalar>(text: &str, rows: usize, cols: usize) -> Result<Matrix<S>, IoError> {
    let value: Value = serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))?;
    let shape = || IoError::Shape { rows, cols };
    let outer = value.as_array().ok_or_else(shape)?;
    if outer.len() != rows {
        return Err(shape());
    }
    let mut out = Vec::with_capacity(rows);
    for (i, row) in outer.iter().enumerate() {
        let row = row.as_array().filter(|r| r.len() == cols).ok_or_else(shape)?;
        let mut parsed = Vec::with_capacity(cols);
        for (j, v) in row.iter().enumerate() {
            let x = scalar_of::<S>(v)
                .ok_or_else(shape)?
                .map_err(|source| IoError::Entry {
                    row: i,
                    col: j,
                    source,
                })?;
            parsed.push(x);
        }
        out.push(parsed);
    }
    Ok(Matrix::from_rows(out))
}

pub fn matrix_to_json<S: Scalar>(m: &Matrix<S>) -> String {
    serde_json::to_string(&m.to_string_rows()).expect("strings serialize")
}

/// An 8-element array of scalar strings.
pub fn parse_octonion_json<S: Scalar>(text: &str) -> Result<Octonion<S>, IoError> {
    let m = parse_matrix_json::<S>(&format!("[{text}]"), 1, 8).map_err(|e| match e {
        IoError::Shape { .. } => IoError::Shape { rows: 1, cols: 8 },
        IoError::Entry { col, source, .. } => IoError::Entry { row: 0, col, source },
        e => e,
    })?;
    Ok(Octonion::from_slice(&m.row(0)))
}
