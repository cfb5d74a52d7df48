//! Balanced parameterization of state-space realizations.
//!
//! A balanced realization with distinct Hankel singular values is fixed by
//! `(θ, r, β, γ, D)`: `B̄` has rows `rᵢβᵢᵀ`, `C̄` has columns `rᵢγᵢ`, and `Ā`
//! follows from the two Lyapunov equations with `X = diag(θ)`:
//!
//! ```text
//! āᵢᵢ = −rᵢ² / (2θᵢ)
//! āᵢⱼ = rᵢ rⱼ αᵢⱼ,   αᵢⱼ = (θⱼ βᵢ·βⱼ − θᵢ γᵢ·γⱼ) / (θᵢ² − θⱼ²)
//! ```

mod census;

pub use census::{param_census, CensusKind, ParamCensus};

use nalgebra::{DMatrix, DVector};
use serde_json::{json, Value};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::lti::io::{matrix_from_value, matrix_to_value};
use crate::lti::{is_stable, BalancedRealization, StateSpace};

const UNIT_NORM_TOL: f64 = 1e-12;

/// `(θ, r, β, γ, D)` of a balanced realization.
///
/// `beta` is `n × m` with unit-norm rows `βᵢᵀ`; `gamma` is `p × n` with
/// unit-norm columns `γᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BalancedParams {
    theta: DVector<f64>,
    r: DVector<f64>,
    beta: DMatrix<f64>,
    gamma: DMatrix<f64>,
    d: DMatrix<f64>,
}

impl BalancedParams {
    pub fn new(
        theta: DVector<f64>,
        r: DVector<f64>,
        beta: DMatrix<f64>,
        gamma: DMatrix<f64>,
        d: DMatrix<f64>,
    ) -> Result<Self> {
        let n = theta.len();
        if n == 0 {
            return Err(Error::invalid("theta", "needs at least one entry"));
        }
        if r.len() != n {
            return Err(Error::invalid("r", format!("expected {n} entries, got {}", r.len())));
        }
        if beta.nrows() != n || beta.ncols() == 0 {
            return Err(Error::invalid("beta", format!("expected {n} rows, got {}", beta.nrows())));
        }
        if gamma.ncols() != n || gamma.nrows() == 0 {
            return Err(Error::invalid("gamma", format!("expected {n} columns, got {}", gamma.ncols())));
        }
        if d.nrows() != gamma.nrows() || d.ncols() != beta.ncols() {
            return Err(Error::invalid(
                "D",
                format!("expected {}x{}, got {}x{}", gamma.nrows(), beta.ncols(), d.nrows(), d.ncols()),
            ));
        }
        for (key, m) in [("theta", theta.as_slice()), ("r", r.as_slice())] {
            if m.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return Err(Error::invalid(key, "entries must be positive and finite"));
            }
        }
        if beta.iter().chain(gamma.iter()).chain(d.iter()).any(|x| !x.is_finite()) {
            return Err(Error::invalid("beta/gamma/D", "entries must be finite"));
        }
        let sep = Tolerances::default().hsv_separation * theta[0];
        for i in 1..n {
            if !(theta[i - 1] - theta[i] > sep) {
                return Err(Error::invalid(
                    "theta",
                    format!("must be strictly decreasing (entries {} and {})", i - 1, i),
                ));
            }
        }
        for i in 0..n {
            if (beta.row(i).norm() - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::invalid("beta", format!("row {i} is not unit norm")));
            }
            if (gamma.column(i).norm() - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::invalid("gamma", format!("column {i} is not unit norm")));
            }
        }
        Ok(Self { theta, r, beta, gamma, d })
    }

    /// Single-input single-output parameters with all `βᵢ = γᵢ = 1`.
    pub fn siso(theta: &[f64], r: &[f64], d: f64) -> Result<Self> {
        let n = theta.len();
        Self::new(
            DVector::from_column_slice(theta),
            DVector::from_column_slice(r),
            DMatrix::from_element(n, 1, 1.0),
            DMatrix::from_element(1, n, 1.0),
            DMatrix::from_element(1, 1, d),
        )
    }

    pub fn order(&self) -> usize {
        self.theta.len()
    }
    pub fn theta(&self) -> &DVector<f64> {
        &self.theta
    }
    pub fn r(&self) -> &DVector<f64> {
        &self.r
    }
    pub fn beta(&self) -> &DMatrix<f64> {
        &self.beta
    }
    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }
    pub fn d(&self) -> &DMatrix<f64> {
        &self.d
    }

    /// Copy with `θᵢ` replaced; the ordering invariant is re-checked.
    pub fn with_theta(&self, i: usize, value: f64) -> Result<Self> {
        let mut theta = self.theta.clone();
        theta[i] = value;
        Self::new(theta, self.r.clone(), self.beta.clone(), self.gamma.clone(), self.d.clone())
    }

    /// Copy with `rᵢ` replaced.
    pub fn with_r(&self, i: usize, value: f64) -> Result<Self> {
        let mut r = self.r.clone();
        r[i] = value;
        Self::new(self.theta.clone(), r, self.beta.clone(), self.gamma.clone(), self.d.clone())
    }

    pub fn from_json_value(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::invalid("<root>", "expected a JSON object"))?;
        let vector = |key: &str| -> Result<DVector<f64>> {
            let arr = obj
                .get(key)
                .ok_or_else(|| Error::invalid(key, "missing key"))?
                .as_array()
                .ok_or_else(|| Error::invalid(key, "expected an array"))?;
            let xs = arr
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| Error::invalid(key, "entries must be numbers")))
                .collect::<Result<Vec<_>>>()?;
            Ok(DVector::from_vec(xs))
        };
        let matrix = |key: &str| -> Result<DMatrix<f64>> {
            matrix_from_value(obj.get(key).ok_or_else(|| Error::invalid(key, "missing key"))?, key)
        };
        Self::new(vector("theta")?, vector("r")?, matrix("beta")?, matrix("gamma")?, matrix("D")?)
    }

    pub fn to_json_value(&self) -> Value {
        json!({
            "theta": self.theta.as_slice(),
            "r": self.r.as_slice(),
            "beta": matrix_to_value(&self.beta),
            "gamma": matrix_to_value(&self.gamma),
            "D": matrix_to_value(&self.d),
        })
    }
}

/// `αᵢⱼ` for `i ≠ j` (zero-based indices).
pub fn alpha(i: usize, j: usize, params: &BalancedParams) -> Result<f64> {
    let n = params.order();
    if i == j || i >= n || j >= n {
        return Err(Error::invalid("alpha", format!("need distinct indices below {n}, got ({i}, {j})")));
    }
    let (ti, tj) = (params.theta[i], params.theta[j]);
    let denom = ti * ti - tj * tj;
    let t1 = params.theta.max();
    if denom.abs() < Tolerances::default().hsv_separation * t1 * t1 {
        return Err(Error::DegenerateHsv { i, j });
    }
    let bb = params.beta.row(i).dot(&params.beta.row(j));
    let gg = params.gamma.column(i).dot(&params.gamma.column(j));
    Ok((tj * bb - ti * gg) / denom)
}

/// Output of [`realize`]: the balanced realization and whether its `Ā` is
/// Hurwitz (checked, never assumed).
#[derive(Debug, Clone)]
pub struct Realized {
    pub balanced: BalancedRealization,
    pub stable: bool,
}

/// Builds `(Ā, B̄, C̄, D)` from balanced parameters.
pub fn realize(params: &BalancedParams) -> Result<Realized> {
    let n = params.order();
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        let ri = params.r[i];
        a[(i, i)] = -ri * ri / (2.0 * params.theta[i]);
        for j in 0..n {
            if i != j {
                a[(i, j)] = ri * params.r[j] * alpha(i, j, params)?;
            }
        }
    }
    let rdiag = DMatrix::from_diagonal(&params.r);
    let b = &rdiag * &params.beta;
    let c = &params.gamma * &rdiag;
    let sys = StateSpace::new(a, b, c, params.d.clone())?;
    let balanced = BalancedRealization::from_parts(sys, params.theta.clone(), DMatrix::identity(n, n))?;

    #[cfg(debug_assertions)]
    {
        let (obs, ctrb) = balanced.lyapunov_residuals();
        let scale = params.r.iter().fold(1.0f64, |m, r| m.max(r * r));
        debug_assert!(
            obs <= 1e-10 * scale * n as f64 && ctrb <= 1e-10 * scale * n as f64,
            "realize: Lyapunov residuals ({obs:.3e}, {ctrb:.3e})"
        );
    }

    let stable = is_stable(balanced.sys());
    Ok(Realized { balanced, stable })
}

/// Lemma-1 check: `max |(BBᵀ)ᵢᵢ − (CᵀC)ᵢᵢ|`, zero for a balanced realization.
pub fn check_lemma1(sys: &StateSpace) -> f64 {
    let bb = sys.b() * sys.b().transpose();
    let cc = sys.c().transpose() * sys.c();
    (0..sys.order())
        .map(|i| (bb[(i, i)] - cc[(i, i)]).abs())
        .fold(0.0, f64::max)
}

/// Recovers `(θ, r, β, γ, D)` from a balanced realization.
///
/// `rᵢ = ‖B̄ᵢ,:‖`, `βᵢ = B̄ᵢ,:ᵀ / rᵢ`, `γᵢ = C̄:,ᵢ / rᵢ`. `γᵢ` is then rescaled
/// to unit norm; the discarded factor is the (tolerated) Lemma-1 deviation.
/// The sign gauge `(βᵢ, γᵢ) → (−βᵢ, −γᵢ)` is fixed by making the first
/// nonzero entry of each `βᵢ` positive.
pub fn extract_params(bal: &BalancedRealization) -> Result<BalancedParams> {
    let tol = Tolerances::default();
    let sys = bal.sys();
    let n = sys.order();
    let bb = sys.b() * sys.b().transpose();
    let cc = sys.c().transpose() * sys.c();
    let scale = (0..n).map(|i| bb[(i, i)].max(cc[(i, i)])).fold(0.0, f64::max);
    let deviation = check_lemma1(sys);
    if deviation > tol.lemma1 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotBalanced { deviation });
    }

    let mut r = DVector::zeros(n);
    let mut beta = DMatrix::zeros(n, sys.inputs());
    let mut gamma = DMatrix::zeros(sys.outputs(), n);
    for i in 0..n {
        let ri = bb[(i, i)].sqrt();
        if !(ri > 1e-150 && ri > 1e-14 * scale.sqrt()) {
            return Err(Error::ZeroRow(i));
        }
        r[i] = ri;
        let mut bi = sys.b().row(i).transpose() / ri;
        let mut gi = sys.c().column(i) / ri;
        bi /= bi.norm();
        gi /= gi.norm();
        let lead = bi.iter().find(|x| x.abs() > 1e-14).copied().unwrap_or(1.0);
        if lead < 0.0 {
            bi = -bi;
            gi = -gi;
        }
        beta.set_row(i, &bi.transpose());
        gamma.set_column(i, &gi);
    }
    BalancedParams::new(bal.hsv().clone(), r, beta, gamma, sys.d().clone())
}
