use nalgebra::{DMatrix, DVector};

use super::{chart_jacobian, Chart, ParamModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub max_iterations: usize,
    pub gradient_tol: f64,
    /// Relative step size below which the iteration counts as converged.
    pub step_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 500,
            gradient_tol: 1e-8,
            step_tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub params: Vec<f64>,
    pub residual_norm: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    /// False when the iteration budget ran out; `params` is then the best
    /// point found.
    pub converged: bool,
}

fn cost(r: &DVector<f64>) -> f64 {
    0.5 * r.norm_squared()
}

/// Levenberg–Marquardt fit of `model` to `target`, minimizing `‖y(p) − target‖²`.
///
/// Iterates in working coordinates (`ln p` for log-scaled parameters), so
/// positive parameters stay positive. Each iteration first tries the plain
/// Gauss–Newton step; damping is only switched on when that fails to descend.
pub fn refit_reduced<M: ParamModel>(
    model: &M,
    target: &DVector<f64>,
    p_init: &[f64],
    opts: &FitOptions,
) -> Result<FitResult> {
    if target.len() != model.data_dim() {
        return Err(Error::invalid(
            "target",
            format!("expected {} values, got {}", model.data_dim(), target.len()),
        ));
    }
    let chart = Chart::new(model);
    let n = chart.n_params();
    let mut q = chart.to_chart(p_init)?;
    let mut r = chart.predict(&q)? - target;
    let mut c = cost(&r);
    let mut lambda = 0.0;
    let mut gradient_norm = f64::INFINITY;

    for it in 0..opts.max_iterations {
        let j = chart_jacobian(&chart, &q)?;
        let g = j.transpose() * &r;
        gradient_norm = g.norm();
        if gradient_norm <= opts.gradient_tol {
            return Ok(done(&chart, q, r, gradient_norm, it, true));
        }
        let h = j.transpose() * &j;
        let max_diag = (0..n).map(|i| h[(i, i)]).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let mut improved = false;
        for _ in 0..60 {
            let mut damped = h.clone();
            for i in 0..n {
                damped[(i, i)] += lambda * h[(i, i)].max(1e-12 * max_diag);
            }
            let step = damped.clone().cholesky().map(|ch| ch.solve(&(-&g)));
            let Some(step) = step else {
                lambda = (lambda * 4.0).max(1e-6);
                continue;
            };
            let trial: Vec<f64> = q.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let in_domain = trial
                .iter()
                .zip(chart.domain())
                .all(|(&x, (lo, hi))| x > lo && x < hi);
            let trial_r = if in_domain { chart.predict(&trial).ok().map(|y| y - target) } else { None };
            match trial_r {
                Some(tr) if tr.iter().all(|v| v.is_finite()) && cost(&tr) <= c => {
                    let small = step.norm() <= opts.step_tol * (DVector::from_column_slice(&q).norm() + opts.step_tol);
                    q = trial;
                    c = cost(&tr);
                    r = tr;
                    lambda = if lambda < 1e-12 { 0.0 } else { lambda / 4.0 };
                    improved = true;
                    if small {
                        return Ok(done(&chart, q, r, gradient_norm, it + 1, true));
                    }
                    break;
                }
                _ => lambda = (lambda * 4.0).max(1e-6),
            }
        }
        if !improved {
            // no descent direction left at working precision
            return Ok(done(&chart, q, r, gradient_norm, it + 1, true));
        }
    }
    let j: DMatrix<f64> = chart_jacobian(&chart, &q)?;
    gradient_norm = (j.transpose() * &r).norm().min(gradient_norm);
    let converged = gradient_norm <= opts.gradient_tol;
    Ok(done(&chart, q, r, gradient_norm, opts.max_iterations, converged))
}

fn done<M: ParamModel>(
    chart: &Chart<M>,
    q: Vec<f64>,
    r: DVector<f64>,
    gradient_norm: f64,
    iterations: usize,
    converged: bool,
) -> FitResult {
    FitResult {
        params: chart.to_physical(&q),
        residual_norm: r.norm(),
        gradient_norm,
        iterations,
        converged,
    }
}
