use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::lu_solve;

/// Continuous-time LTI system `ẋ = Ax + Bu`, `y = Cx + Du`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    d: DMatrix<f64>,
}

impl StateSpace {
    /// Builds a system after checking that the four blocks have consistent
    /// shapes and finite entries.
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>, d: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if n == 0 || !a.is_square() {
            return Err(Error::Dimension(format!(
                "A must be square and non-empty, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if b.nrows() != n || b.ncols() == 0 {
            return Err(Error::Dimension(format!(
                "B must be {n}xm with m > 0, got {}x{}",
                b.nrows(),
                b.ncols()
            )));
        }
        if c.ncols() != n || c.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "C must be px{n} with p > 0, got {}x{}",
                c.nrows(),
                c.ncols()
            )));
        }
        if d.nrows() != c.nrows() || d.ncols() != b.ncols() {
            return Err(Error::Dimension(format!(
                "D must be {}x{}, got {}x{}",
                c.nrows(),
                b.ncols(),
                d.nrows(),
                d.ncols()
            )));
        }
        for (name, m) in [("A", &a), ("B", &b), ("C", &c), ("D", &d)] {
            if m.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid(name, "entries must be finite"));
            }
        }
        Ok(Self { a, b, c, d })
    }

    /// Convenience constructor from row-major slices.
    pub fn from_rows(n: usize, m: usize, p: usize, a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Result<Self> {
        for (name, len, want) in [
            ("A", a.len(), n * n),
            ("B", b.len(), n * m),
            ("C", c.len(), p * n),
            ("D", d.len(), p * m),
        ] {
            if len != want {
                return Err(Error::Dimension(format!("{name} needs {want} entries, got {len}")));
            }
        }
        Self::new(
            DMatrix::from_row_slice(n, n, a),
            DMatrix::from_row_slice(n, m, b),
            DMatrix::from_row_slice(p, n, c),
            DMatrix::from_row_slice(p, m, d),
        )
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }
    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }
    pub fn d(&self) -> &DMatrix<f64> {
        &self.d
    }

    /// Number of states.
    pub fn order(&self) -> usize {
        self.a.nrows()
    }
    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }
    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    pub fn into_parts(self) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        (self.a, self.b, self.c, self.d)
    }

    /// Change of state basis `x = T x̃`: returns `(T⁻¹AT, T⁻¹B, CT, D)`.
    pub fn similarity(&self, t: &DMatrix<f64>) -> Result<Self> {
        let n = self.order();
        if t.nrows() != n || t.ncols() != n {
            return Err(Error::Dimension(format!("T must be {n}x{n}")));
        }
        let tol = Tolerances::default();
        let mut rhs = DMatrix::zeros(n, n + self.inputs());
        rhs.columns_mut(0, n).copy_from(&(&self.a * t));
        rhs.columns_mut(n, self.inputs()).copy_from(&self.b);
        let x = lu_solve(t.clone(), &rhs, tol.singular_pivot, "similarity transform")?;
        Self::new(
            x.columns(0, n).into_owned(),
            x.columns(n, self.inputs()).into_owned(),
            &self.c * t,
            self.d.clone(),
        )
    }

    /// `G(s) = C (sI − A)⁻¹ B + D`, evaluated with a complex linear solve.
    pub fn eval_transfer(&self, s: Complex64) -> Result<DMatrix<Complex64>> {
        let n = self.order();
        let shifted = DMatrix::from_fn(n, n, |i, j| {
            let v = Complex64::new(-self.a[(i, j)], 0.0);
            if i == j {
                v + s
            } else {
                v
            }
        });
        let b = self.b.map(|x| Complex64::new(x, 0.0));
        let z = lu_solve(shifted, &b, Tolerances::default().singular_pivot, "sI - A")
            .map_err(|_| Error::PoleHit { re: s.re, im: s.im })?;
        let c = self.c.map(|x| Complex64::new(x, 0.0));
        Ok(c * z + self.d.map(|x| Complex64::new(x, 0.0)))
    }

    /// DC gain `G(0)`.
    pub fn dc_gain(&self) -> Result<DMatrix<f64>> {
        Ok(self.eval_transfer(Complex64::new(0.0, 0.0))?.map(|z| z.re))
    }

    pub fn frequency_response(&self, frequencies: &[f64]) -> Result<FrequencyResponse> {
        if frequencies.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("frequencies", "must be strictly increasing"));
        }
        let values = frequencies
            .iter()
            .map(|&w| self.eval_transfer(Complex64::new(0.0, w)))
            .collect::<Result<Vec<_>>>()?;
        Ok(FrequencyResponse {
            frequencies: frequencies.to_vec(),
            values,
        })
    }

    /// `G − other` as a parallel interconnection: block-diagonal A,
    /// stacked B, output `[C, −C_other]`, feedthrough `D − D_other`.
    pub fn difference(&self, other: &StateSpace) -> Result<StateSpace> {
        if self.inputs() != other.inputs() || self.outputs() != other.outputs() {
            return Err(Error::Dimension("difference needs matching input/output counts".into()));
        }
        let (n1, n2) = (self.order(), other.order());
        let n = n1 + n2;
        let mut a = DMatrix::zeros(n, n);
        a.view_mut((0, 0), (n1, n1)).copy_from(&self.a);
        a.view_mut((n1, n1), (n2, n2)).copy_from(&other.a);
        let mut b = DMatrix::zeros(n, self.inputs());
        b.rows_mut(0, n1).copy_from(&self.b);
        b.rows_mut(n1, n2).copy_from(&other.b);
        let mut c = DMatrix::zeros(self.outputs(), n);
        c.columns_mut(0, n1).copy_from(&self.c);
        c.columns_mut(n1, n2).copy_from(&(-&other.c));
        StateSpace::new(a, b, c, &self.d - &other.d)
    }
}

/// Sampled frequency response `G(iω)`.
#[derive(Debug, Clone)]
pub struct FrequencyResponse {
    pub frequencies: Vec<f64>,
    pub values: Vec<DMatrix<Complex64>>,
}
