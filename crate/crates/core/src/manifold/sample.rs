use std::io::Write;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mbam::ParamModel;

/// One grid axis; `log` spaces the points geometrically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub log: bool,
}

impl Axis {
    pub fn linear(lo: f64, hi: f64, points: usize) -> Self {
        Axis { lo, hi, points, log: false }
    }

    pub fn log(lo: f64, hi: f64, points: usize) -> Self {
        Axis { lo, hi, points, log: true }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points == 0 || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::invalid("grid", "axis needs finite bounds and at least one point"));
        }
        if self.log && !(self.lo > 0.0 && self.hi > 0.0) {
            return Err(Error::invalid("grid", "log axis needs positive bounds"));
        }
        if self.points == 1 {
            return Ok(vec![self.lo]);
        }
        let last = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|k| {
                let s = k as f64 / last;
                if self.log {
                    (self.lo.ln() + s * (self.hi.ln() - self.lo.ln())).exp()
                } else {
                    self.lo + s * (self.hi - self.lo)
                }
            })
            .collect())
    }
}

/// Rectangular parameter grid, one axis per parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
}

impl GridSpec {
    /// Grid points in row-major order (the last axis varies fastest).
    pub fn points(&self) -> Result<Vec<Vec<f64>>> {
        let values: Vec<Vec<f64>> = self.axes.iter().map(Axis::values).collect::<Result<_>>()?;
        let mut out = vec![Vec::new()];
        for axis in &values {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        Ok(out)
    }
}

/// Parameter points, their data points and labels. A failed evaluation is
/// kept as a gap: `data` is `None` and the tag carries the error.
#[derive(Debug, Clone, Default)]
pub struct ManifoldSample {
    pub params: Vec<Vec<f64>>,
    pub data: Vec<Option<DVector<f64>>>,
    pub tags: Vec<String>,
    /// Times or frequencies the model samples at.
    pub sample_spec: Vec<f64>,
}

impl ManifoldSample {
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Evaluates `model` at `points` (in parallel; order preserved) and
    /// appends them with the given tag.
    pub fn extend_with<M: ParamModel>(&mut self, model: &M, points: Vec<Vec<f64>>, tag: &str) {
        let results: Vec<Result<DVector<f64>>> = points.par_iter().map(|p| evaluate(model, p)).collect();
        for (p, r) in points.into_iter().zip(results) {
            self.params.push(p);
            match r {
                Ok(y) => {
                    self.data.push(Some(y));
                    self.tags.push(tag.to_string());
                }
                Err(e) => {
                    self.data.push(None);
                    self.tags.push(format!("gap: {e}"));
                }
            }
        }
    }

    pub fn gaps(&self) -> usize {
        self.data.iter().filter(|d| d.is_none()).count()
    }

    /// CSV with header `p_1..p_N, y_1..y_M, tag`; gaps leave the `y` cells empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let n = self.params.first().map_or(0, |p| p.len());
        let m = self.data.iter().flatten().next().map_or(0, |y| y.len());
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=n).map(|i| format!("p_{i}")).collect();
        header.extend((1..=m).map(|i| format!("y_{i}")));
        header.push("tag".into());
        w.write_record(&header)?;
        for k in 0..self.len() {
            let mut row: Vec<String> = self.params[k].iter().map(|x| format!("{x:e}")).collect();
            match &self.data[k] {
                Some(y) => row.extend(y.iter().map(|x| format!("{x:e}"))),
                None => row.extend(std::iter::repeat_n(String::new(), m)),
            }
            row.push(self.tags[k].clone());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn evaluate<M: ParamModel>(model: &M, p: &[f64]) -> Result<DVector<f64>> {
    let y = model.predict(p)?;
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::IntegrationFailure("non-finite prediction".into()));
    }
    Ok(y)
}

/// Evaluates `model` over `grid`; points are tagged `"interior"`.
pub fn sample_manifold<M: ParamModel>(model: &M, grid: &GridSpec) -> Result<ManifoldSample> {
    if grid.axes.len() != model.n_params() {
        return Err(Error::invalid(
            "grid",
            format!("expected {} axes, got {}", model.n_params(), grid.axes.len()),
        ));
    }
    let mut sample = ManifoldSample::default();
    sample.extend_with(model, grid.points()?, "interior");
    Ok(sample)
}
