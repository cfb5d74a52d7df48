//! Manifold boundary approximation: finite-difference sensitivities, the
//! Fisher information metric, geodesics on the model manifold and the
//! classification of the parameter limits they run into.

mod classify;
mod fit;
mod geodesic;

use nalgebra::{DMatrix, DVector};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;

pub use classify::{classify_limit, ClassifyOptions, InvariantCandidate, LimitClassification, LimitKind};
pub use fit::{refit_reduced, FitOptions, FitResult};
pub use geodesic::{run_geodesic, GeodesicOptions, GeodesicTrace, Termination};

/// A deterministic map from parameters `p ∈ R^N` to sampled outputs `y ∈ R^M`.
pub trait ParamModel: Sync {
    fn n_params(&self) -> usize;
    fn data_dim(&self) -> usize;
    fn predict(&self, p: &[f64]) -> Result<DVector<f64>>;

    /// Open interval of admissible values per parameter.
    fn domain(&self) -> Vec<(f64, f64)> {
        vec![(0.0, f64::INFINITY); self.n_params()]
    }

    /// Parameters whose geometry is computed in `ln p`.
    fn log_scaled(&self) -> Vec<bool> {
        vec![false; self.n_params()]
    }

    /// Coordinate scale used to size finite-difference steps.
    fn step_scale(&self, _index: usize, value: f64) -> f64 {
        value.abs().max(1e-2)
    }

    fn param_names(&self) -> Vec<String> {
        (1..=self.n_params()).map(|i| format!("p_{i}")).collect()
    }
}

impl<M: ParamModel + ?Sized> ParamModel for &M {
    fn n_params(&self) -> usize {
        (**self).n_params()
    }
    fn data_dim(&self) -> usize {
        (**self).data_dim()
    }
    fn predict(&self, p: &[f64]) -> Result<DVector<f64>> {
        (**self).predict(p)
    }
    fn domain(&self) -> Vec<(f64, f64)> {
        (**self).domain()
    }
    fn log_scaled(&self) -> Vec<bool> {
        (**self).log_scaled()
    }
    fn step_scale(&self, index: usize, value: f64) -> f64 {
        (**self).step_scale(index, value)
    }
    fn param_names(&self) -> Vec<String> {
        (**self).param_names()
    }
}

/// A model given by a closure. The domain defaults to the whole real line.
pub struct FnModel<F> {
    n: usize,
    m: usize,
    f: F,
    domain: Vec<(f64, f64)>,
    log: Vec<bool>,
    names: Vec<String>,
}

impl<F> FnModel<F>
where
    F: Fn(&[f64]) -> Result<DVector<f64>> + Sync,
{
    pub fn new(n_params: usize, data_dim: usize, f: F) -> Result<Self> {
        if n_params == 0 || data_dim <= n_params {
            return Err(Error::invalid(
                "data_dim",
                format!("need data_dim > n_params >= 1, got {data_dim} and {n_params}"),
            ));
        }
        Ok(FnModel {
            n: n_params,
            m: data_dim,
            f,
            domain: vec![(f64::NEG_INFINITY, f64::INFINITY); n_params],
            log: vec![false; n_params],
            names: (1..=n_params).map(|i| format!("p_{i}")).collect(),
        })
    }

    pub fn with_domain(mut self, domain: Vec<(f64, f64)>) -> Self {
        assert_eq!(domain.len(), self.n);
        self.domain = domain;
        self
    }

    pub fn with_log_scaled(mut self, log: Vec<bool>) -> Self {
        assert_eq!(log.len(), self.n);
        self.log = log;
        self
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.n);
        self.names = names;
        self
    }
}

impl<F> ParamModel for FnModel<F>
where
    F: Fn(&[f64]) -> Result<DVector<f64>> + Sync,
{
    fn n_params(&self) -> usize {
        self.n
    }
    fn data_dim(&self) -> usize {
        self.m
    }
    fn predict(&self, p: &[f64]) -> Result<DVector<f64>> {
        (self.f)(p)
    }
    fn domain(&self) -> Vec<(f64, f64)> {
        self.domain.clone()
    }
    fn log_scaled(&self) -> Vec<bool> {
        self.log.clone()
    }
    fn param_names(&self) -> Vec<String> {
        self.names.clone()
    }
}

/// The model re-expressed in working coordinates: `qᵢ = ln pᵢ` for
/// log-scaled parameters, `qᵢ = pᵢ` otherwise.
pub struct Chart<M> {
    model: M,
    log: Vec<bool>,
}

impl<M: ParamModel> Chart<M> {
    pub fn new(model: M) -> Self {
        let log = model.log_scaled();
        Chart { model, log }
    }

    pub fn inner(&self) -> &M {
        &self.model
    }

    pub fn to_physical(&self, q: &[f64]) -> Vec<f64> {
        q.iter()
            .zip(&self.log)
            .map(|(&x, &l)| if l { x.exp() } else { x })
            .collect()
    }

    pub fn to_chart(&self, p: &[f64]) -> Result<Vec<f64>> {
        p.iter()
            .zip(&self.log)
            .enumerate()
            .map(|(i, (&x, &l))| {
                if !l {
                    Ok(x)
                } else if x > 0.0 {
                    Ok(x.ln())
                } else {
                    Err(Error::DomainViolation { index: i, value: x })
                }
            })
            .collect()
    }

    /// Maps a chart velocity at `q` to `dp/dτ`.
    pub fn velocity_to_physical(&self, q: &[f64], v: &[f64]) -> Vec<f64> {
        (0..q.len())
            .map(|i| if self.log[i] { q[i].exp() * v[i] } else { v[i] })
            .collect()
    }
}

impl<M: ParamModel> ParamModel for Chart<M> {
    fn n_params(&self) -> usize {
        self.model.n_params()
    }
    fn data_dim(&self) -> usize {
        self.model.data_dim()
    }
    fn predict(&self, q: &[f64]) -> Result<DVector<f64>> {
        self.model.predict(&self.to_physical(q))
    }
    fn domain(&self) -> Vec<(f64, f64)> {
        self.model
            .domain()
            .into_iter()
            .zip(&self.log)
            .map(|((lo, hi), &l)| if l { (lo.max(0.0).ln(), hi.ln()) } else { (lo, hi) })
            .collect()
    }
    fn log_scaled(&self) -> Vec<bool> {
        vec![false; self.n_params()]
    }
    fn step_scale(&self, index: usize, value: f64) -> f64 {
        if self.log[index] {
            1.0
        } else {
            self.model.step_scale(index, value)
        }
    }
    fn param_names(&self) -> Vec<String> {
        self.model.param_names()
    }
}

fn check_point<M: ParamModel + ?Sized>(model: &M, p: &[f64]) -> Result<()> {
    if p.len() != model.n_params() {
        return Err(Error::invalid(
            "p",
            format!("expected {} parameters, got {}", model.n_params(), p.len()),
        ));
    }
    for (i, (&x, (lo, hi))) in p.iter().zip(model.domain()).enumerate() {
        if !(x > lo && x < hi) {
            return Err(Error::DomainViolation { index: i, value: x });
        }
    }
    Ok(())
}

fn predict_checked<M: ParamModel + ?Sized>(model: &M, p: &[f64]) -> Result<DVector<f64>> {
    check_point(model, p)?;
    let y = model.predict(p)?;
    if y.len() != model.data_dim() {
        return Err(Error::Dimension(format!(
            "model returned {} outputs, expected {}",
            y.len(),
            model.data_dim()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::IntegrationFailure(format!("non-finite prediction at {p:?}")));
    }
    Ok(y)
}

/// `∂y/∂p` by central differences with `hₗ = 1e-6 · step_scale`.
///
/// For a model with log-scaled parameters the returned Jacobian is still with
/// respect to the physical `p`: the probes are taken in `ln p` and the chain
/// rule is applied afterwards.
pub fn jacobian<M: ParamModel + ?Sized>(model: &M, p: &[f64]) -> Result<DMatrix<f64>> {
    let log = model.log_scaled();
    if log.iter().any(|&l| l) {
        let chart = Chart::new(model);
        let q = chart.to_chart(p)?;
        let mut j = chart_jacobian(&chart, &q)?;
        for (l, col) in log.iter().zip(0..j.ncols()) {
            if *l {
                let scale = 1.0 / p[col];
                j.column_mut(col).scale_mut(scale);
            }
        }
        return Ok(j);
    }
    chart_jacobian(model, p)
}

/// Central-difference Jacobian in the model's own coordinates (log scaling
/// ignored).
pub(crate) fn chart_jacobian<M: ParamModel + ?Sized>(model: &M, p: &[f64]) -> Result<DMatrix<f64>> {
    check_point(model, p)?;
    let n = model.n_params();
    let mut j = DMatrix::zeros(model.data_dim(), n);
    let mut probe = p.to_vec();
    for l in 0..n {
        let h = 1e-6 * model.step_scale(l, p[l]);
        // use the step actually representable at p
        let (hi, lo) = (p[l] + h, p[l] - h);
        probe[l] = hi;
        let up = predict_checked(model, &probe)?;
        probe[l] = lo;
        let down = predict_checked(model, &probe)?;
        probe[l] = p[l];
        j.set_column(l, &((up - down) / (hi - lo)));
    }
    Ok(j)
}

/// Fisher information with unit measurement covariance, `I = JᵀJ`.
pub fn fim(j: &DMatrix<f64>) -> DMatrix<f64> {
    j.transpose() * j
}

/// `I = Jᵀ W J` for per-sample weights `W = diag(w)`.
pub fn fim_weighted(j: &DMatrix<f64>, weights: &[f64]) -> DMatrix<f64> {
    let w = DMatrix::from_diagonal(&DVector::from_column_slice(weights));
    j.transpose() * w * j
}

/// Sloppiest direction of the metric, oriented by the geodesic acceleration.
#[derive(Debug, Clone)]
pub struct InitialVelocity {
    /// Unit vector in the model's coordinates.
    pub v: DVector<f64>,
    pub eigenvalue: f64,
    /// Smallest eigenvalue not clearly separated from zero noise or from the
    /// next eigenvalue; `v` is then a deterministic tie-break.
    pub degenerate: bool,
}

/// Ratio below which the two smallest FIM eigenvalues count as tied.
pub const EIGEN_SEPARATION: f64 = 1.0 + 1e-6;

/// Eigenvector of the smallest FIM eigenvalue at `p0`, flipped if needed so
/// that it has a non-negative component along the geodesic acceleration.
pub fn initial_velocity<M: ParamModel + ?Sized>(model: &M, p0: &[f64]) -> Result<InitialVelocity> {
    let j = chart_jacobian(model, p0)?;
    let info = fim(&j);
    let eig = symmetric_eigen(&info, &Tolerances::default())?;
    let n = info.nrows();
    let lmin = eig.values[0];
    let lmax = eig.values[n - 1];
    let noise = 1e-14 * lmax.abs().max(f64::MIN_POSITIVE);
    let degenerate = lmin <= noise || (n > 1 && eig.values[1] <= lmin * EIGEN_SEPARATION);

    let mut v: DVector<f64> = eig.vectors.column(0).into_owned();
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12).copied() {
        if first < 0.0 {
            v.neg_mut();
        }
    }
    // The eigenvector is defined up to sign; the acceleration is quadratic in v.
    let a = geodesic_acceleration(model, p0, v.as_slice())?;
    if v.dot(&a) < 0.0 {
        v.neg_mut();
    }
    Ok(InitialVelocity {
        v,
        eigenvalue: lmin,
        degenerate,
    })
}

/// FIM condition-number ceiling used to detect the manifold boundary.
pub const FIM_CONDITION_MAX: f64 = 1e12;

/// Geodesic acceleration `a = −I⁻¹Jᵀw`, with `w` the second directional
/// derivative of `y` along `v`, in the model's own coordinates.
pub fn geodesic_acceleration<M: ParamModel + ?Sized>(model: &M, p: &[f64], v: &[f64]) -> Result<DVector<f64>> {
    let j = chart_jacobian(model, p)?;
    acceleration_from_jacobian(model, p, v, &j, FIM_CONDITION_MAX)
}

/// Second directional derivative of `y` along `v`: two central second
/// differences (probe lengths `t` and `t/2`) combined by Richardson
/// extrapolation, which cancels the `O(t²)` term.
pub(crate) fn directional_second_derivative<M: ParamModel + ?Sized>(
    model: &M,
    p: &[f64],
    v: &[f64],
) -> Result<DVector<f64>> {
    let rel = 2e-3;
    let mut t = f64::INFINITY;
    for (i, &vi) in v.iter().enumerate() {
        if vi != 0.0 {
            t = t.min(rel * model.step_scale(i, p[i]) / vi.abs());
        }
    }
    if !t.is_finite() {
        return Ok(DVector::zeros(model.data_dim()));
    }
    let at = |s: f64| -> Result<DVector<f64>> {
        let x: Vec<f64> = p.iter().zip(v).map(|(x, d)| x + s * d).collect();
        predict_checked(model, &x)
    };
    let mid = predict_checked(model, p)?;
    let coarse = (at(t)? + at(-t)? - &mid * 2.0) / (t * t);
    let half = 0.5 * t;
    let fine = (at(half)? + at(-half)? - &mid * 2.0) / (half * half);
    Ok((fine * 4.0 - coarse) / 3.0)
}

pub(crate) fn fim_condition(j: &DMatrix<f64>) -> f64 {
    let sv = j.clone().singular_values();
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if smin > 0.0 {
        (smax / smin).powi(2)
    } else {
        f64::INFINITY
    }
}

pub(crate) fn acceleration_from_jacobian<M: ParamModel + ?Sized>(
    model: &M,
    p: &[f64],
    v: &[f64],
    j: &DMatrix<f64>,
    condition_max: f64,
) -> Result<DVector<f64>> {
    let condition = fim_condition(j);
    if !(condition <= condition_max) {
        return Err(Error::SingularFim { condition });
    }
    let w = directional_second_derivative(model, p, v)?;
    // a = −(JᵀJ)⁻¹Jᵀw = −J⁺w, solved on J directly to keep the conditioning
    let svd = j.clone().svd(true, true);
    let x = svd
        .solve(&w, 0.0)
        .map_err(|_| Error::SingularFim { condition })?;
    Ok(-x)
}
