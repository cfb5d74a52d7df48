//! Balanced truncation, singular perturbation approximation and the family of
//! reductions between them.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::lti::{balance, hinf_norm, BalancedRealization, StateSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bt,
    Bspa,
    Interp,
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bt" => Ok(Method::Bt),
            "bspa" => Ok(Method::Bspa),
            "interp" => Ok(Method::Interp),
            other => Err(Error::invalid("method", format!("unknown method `{other}` (bt|bspa|interp)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ReductionWarning {
    /// `θ_{n−k}` and `θ_{n−k+1}` are (nearly) equal: the cut splits a
    /// repeated singular value.
    SplitAtRepeatedHsv { retained: f64, removed: f64 },
}

#[derive(Debug, Clone)]
pub struct ReductionResult {
    pub reduced: StateSpace,
    pub method: Method,
    pub removed_states: usize,
    /// Interpolation knobs, one per removed state (empty unless `Interp`).
    pub eta: Vec<f64>,
    pub a_priori_bound: f64,
    pub warnings: Vec<ReductionWarning>,
}

/// The blocks of `(Ā, B̄, C̄)` split after the first `n − k` states.
#[derive(Debug, Clone)]
pub struct Partition {
    pub a11: DMatrix<f64>,
    pub a12: DMatrix<f64>,
    pub a21: DMatrix<f64>,
    pub a22: DMatrix<f64>,
    pub b1: DMatrix<f64>,
    pub b2: DMatrix<f64>,
    pub c1: DMatrix<f64>,
    pub c2: DMatrix<f64>,
}

impl Partition {
    /// Reassembles `(A, B, C)`.
    pub fn assemble(&self) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        let (r, k) = (self.a11.nrows(), self.a22.nrows());
        let n = r + k;
        let mut a = DMatrix::zeros(n, n);
        a.view_mut((0, 0), (r, r)).copy_from(&self.a11);
        a.view_mut((0, r), (r, k)).copy_from(&self.a12);
        a.view_mut((r, 0), (k, r)).copy_from(&self.a21);
        a.view_mut((r, r), (k, k)).copy_from(&self.a22);
        let mut b = DMatrix::zeros(n, self.b1.ncols());
        b.rows_mut(0, r).copy_from(&self.b1);
        b.rows_mut(r, k).copy_from(&self.b2);
        let mut c = DMatrix::zeros(self.c1.nrows(), n);
        c.columns_mut(0, r).copy_from(&self.c1);
        c.columns_mut(r, k).copy_from(&self.c2);
        (a, b, c)
    }
}

fn check_order(n: usize, k: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::BadOrder { k, n });
    }
    Ok(())
}

fn split(sys: &StateSpace, k: usize) -> Result<Partition> {
    let n = sys.order();
    check_order(n, k)?;
    let r = n - k;
    let (a, b, c) = (sys.a(), sys.b(), sys.c());
    Ok(Partition {
        a11: a.view((0, 0), (r, r)).into_owned(),
        a12: a.view((0, r), (r, k)).into_owned(),
        a21: a.view((r, 0), (k, r)).into_owned(),
        a22: a.view((r, r), (k, k)).into_owned(),
        b1: b.rows(0, r).into_owned(),
        b2: b.rows(r, k).into_owned(),
        c1: c.columns(0, r).into_owned(),
        c2: c.columns(r, k).into_owned(),
    })
}

/// Splits a balanced realization into retained (`n − k`) and removed (`k`) states.
pub fn partition(bal: &BalancedRealization, k: usize) -> Result<Partition> {
    split(bal.sys(), k)
}

fn split_warnings(bal: &BalancedRealization, k: usize) -> Vec<ReductionWarning> {
    let hsv = bal.hsv();
    let n = hsv.len();
    let (retained, removed) = (hsv[n - k - 1], hsv[n - k]);
    if retained - removed <= 1e-8 * retained {
        vec![ReductionWarning::SplitAtRepeatedHsv { retained, removed }]
    } else {
        Vec::new()
    }
}

/// A priori H∞ error bound for removing the `k` smallest HSVs: `2θ_{n−k+1}`
/// when the removed HSVs are all equal, `2 Σ` of the removed HSVs otherwise.
pub fn error_bound(hsv: &[f64], k: usize) -> f64 {
    let n = hsv.len();
    if k == 0 || k > n {
        return 0.0;
    }
    let tail = &hsv[n - k..];
    let first = tail[0];
    if tail.iter().all(|&t| (t - first).abs() <= 1e-12 * first.abs().max(f64::MIN_POSITIVE)) {
        2.0 * first
    } else {
        2.0 * tail.iter().sum::<f64>()
    }
}

/// Balanced truncation: keeps `(Ā₁₁, B̄₁, C̄₁, D̄)`.
pub fn balanced_truncate(bal: &BalancedRealization, k: usize) -> Result<ReductionResult> {
    let blocks = partition(bal, k)?;
    let reduced = StateSpace::new(blocks.a11, blocks.b1, blocks.c1, bal.sys().d().clone())?;
    Ok(ReductionResult {
        reduced,
        method: Method::Bt,
        removed_states: k,
        eta: Vec::new(),
        a_priori_bound: error_bound(bal.hsv().as_slice(), k),
        warnings: split_warnings(bal, k),
    })
}

/// Balanced singular perturbation approximation: the Schur complement of `Ā₂₂`.
///
/// The complement is built by eliminating the removed states one at a time,
/// last first. Residualizing one state of a balanced realization leaves a
/// balanced realization, so every pivot is a diagonal entry `−rᵢ²/2θᵢ` of a
/// balanced system and is bounded away from zero; no pivoting is needed, and
/// the result is the same sequence of operations as
/// [`interpolated_reduce`] at `η = θ`.
pub fn bspa(bal: &BalancedRealization, k: usize) -> Result<ReductionResult> {
    check_order(bal.order(), k)?;
    let mut sys = bal.sys().clone();
    for _ in 0..k {
        sys = remove_last_state(&sys, 1.0)?;
    }
    Ok(ReductionResult {
        reduced: sys,
        method: Method::Bspa,
        removed_states: k,
        eta: Vec::new(),
        a_priori_bound: error_bound(bal.hsv().as_slice(), k),
        warnings: split_warnings(bal, k),
    })
}

/// Removes the last state of `sys` with the singular-perturbation correction
/// terms scaled by `weight` (`0` truncates, `1` is the exact Schur complement).
fn remove_last_state(sys: &StateSpace, weight: f64) -> Result<StateSpace> {
    let blocks = split(sys, 1)?;
    let ann = blocks.a22[(0, 0)];
    if ann == 0.0 || !ann.is_finite() {
        return Err(Error::SingularA22);
    }
    let s = weight / ann;
    let a = &blocks.a11 - &blocks.a12 * &blocks.a21 * s;
    let b = &blocks.b1 - &blocks.a12 * &blocks.b2 * s;
    let c = &blocks.c1 - &blocks.c2 * &blocks.a21 * s;
    let d = sys.d() - &blocks.c2 * &blocks.b2 * s;
    StateSpace::new(a, b, c, d)
}

/// Reduction between BT and BSPA.
///
/// States are removed one at a time from the last one inward. `eta[j]` is the
/// knob of state `n − k + j` (so `eta` lines up with the removed HSV tail);
/// removing a state with knob `η` and HSV `θ` applies the one-state singular
/// perturbation step with its correction terms scaled by `η / θ`. `η = 0`
/// truncates, `η = θ` is exact singular perturbation.
pub fn interpolated_reduce(bal: &BalancedRealization, k: usize, eta: &[f64]) -> Result<ReductionResult> {
    let n = bal.order();
    check_order(n, k)?;
    if eta.len() != k {
        return Err(Error::invalid("eta", format!("expected {k} values, got {}", eta.len())));
    }
    let hsv = bal.hsv();
    for (j, &e) in eta.iter().enumerate() {
        let theta = hsv[n - k + j];
        if !(0.0..=theta).contains(&e) {
            return Err(Error::EtaOutOfRange { index: j, eta: e, theta });
        }
    }
    let mut sys = bal.sys().clone();
    for j in (0..k).rev() {
        let theta = hsv[n - k + j];
        let weight = if eta[j] == theta { 1.0 } else { eta[j] / theta };
        sys = remove_last_state(&sys, weight)?;
    }
    Ok(ReductionResult {
        reduced: sys,
        method: Method::Interp,
        removed_states: k,
        eta: eta.to_vec(),
        a_priori_bound: error_bound(hsv.as_slice(), k),
        warnings: split_warnings(bal, k),
    })
}

/// Dispatches on `method`; `eta` is only used by `Interp`.
pub fn reduce(bal: &BalancedRealization, k: usize, method: Method, eta: &[f64]) -> Result<ReductionResult> {
    match method {
        Method::Bt => balanced_truncate(bal, k),
        Method::Bspa => bspa(bal, k),
        Method::Interp => interpolated_reduce(bal, k, eta),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundCheck {
    pub actual_error: f64,
    pub bound: f64,
    pub satisfied: bool,
}

/// Balances `sys`, reduces by `k` states and compares `‖G − G_r‖∞` with the
/// a priori bound. `k = 0` is the trivial zero-error case.
pub fn verify_bounds(sys: &StateSpace, k: usize, method: Method, eta: &[f64]) -> Result<BoundCheck> {
    if k == 0 {
        return Ok(BoundCheck {
            actual_error: 0.0,
            bound: 0.0,
            satisfied: true,
        });
    }
    let bal = balance(sys)?;
    let result = reduce(&bal, k, method, eta)?;
    let actual_error = hinf_norm(&sys.difference(&result.reduced)?)?.norm;
    let bound = result.a_priori_bound;
    let slack = Tolerances::default().hinf_rel * bound + 1e-12;
    Ok(BoundCheck {
        actual_error,
        bound,
        satisfied: actual_error <= bound + slack,
    })
}
