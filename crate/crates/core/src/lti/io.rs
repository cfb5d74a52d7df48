//! JSON interchange for state-space systems.
//!
//! A system is an object with keys `"A"`, `"B"`, `"C"`, `"D"`, each a
//! row-major nested array of finite doubles. Dimensions are inferred from the
//! arrays and validated.

use nalgebra::DMatrix;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::lti::StateSpace;

/// Parses a row-major nested array into a matrix; `key` names the field in
/// error messages.
pub fn matrix_from_value(value: &Value, key: &str) -> Result<DMatrix<f64>> {
    let rows = value
        .as_array()
        .ok_or_else(|| Error::invalid(key, "expected an array of rows"))?;
    if rows.is_empty() {
        return Err(Error::invalid(key, "matrix has no rows"));
    }
    let mut data = Vec::new();
    let mut ncols = None;
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::invalid(key, format!("row {i} is not an array")))?;
        match ncols {
            None => ncols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(Error::invalid(key, format!("row {i} has {} entries, expected {c}", row.len())))
            }
            _ => {}
        }
        for (j, x) in row.iter().enumerate() {
            let x = x
                .as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::invalid(key, format!("entry ({i},{j}) is not a finite number")))?;
            data.push(x);
        }
    }
    let ncols = ncols.unwrap_or(0);
    if ncols == 0 {
        return Err(Error::invalid(key, "matrix has no columns"));
    }
    Ok(DMatrix::from_row_slice(rows.len(), ncols, &data))
}

pub fn matrix_to_value(m: &DMatrix<f64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!(m[(i, j)])).collect()))
            .collect(),
    )
}

pub(crate) fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::invalid(key, "missing key"))
}

impl StateSpace {
    pub fn from_json_value(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::invalid("<root>", "expected a JSON object"))?;
        let a = matrix_from_value(field(obj, "A")?, "A")?;
        let b = matrix_from_value(field(obj, "B")?, "B")?;
        let c = matrix_from_value(field(obj, "C")?, "C")?;
        let d = matrix_from_value(field(obj, "D")?, "D")?;
        if !a.is_square() {
            return Err(Error::invalid("A", format!("must be square, got {}x{}", a.nrows(), a.ncols())));
        }
        let n = a.nrows();
        if b.nrows() != n {
            return Err(Error::invalid("B", format!("must have {n} rows, got {}", b.nrows())));
        }
        if c.ncols() != n {
            return Err(Error::invalid("C", format!("must have {n} columns, got {}", c.ncols())));
        }
        if d.nrows() != c.nrows() || d.ncols() != b.ncols() {
            return Err(Error::invalid(
                "D",
                format!("must be {}x{}, got {}x{}", c.nrows(), b.ncols(), d.nrows(), d.ncols()),
            ));
        }
        StateSpace::new(a, b, c, d)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::invalid("<root>", e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "A": matrix_to_value(self.a()),
            "B": matrix_to_value(self.b()),
            "C": matrix_to_value(self.c()),
            "D": matrix_to_value(self.d()),
        })
    }
}
