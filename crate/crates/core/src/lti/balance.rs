use nalgebra::{DMatrix, DVector};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::lti::{gramians, StateSpace};

/// A balanced realization: both Gramians equal `diag(hsv)`.
///
/// `transform` is the change of basis from the source realization with the
/// convention `x = T x̄`, i.e. `Ā = T⁻¹AT`, `B̄ = T⁻¹B`, `C̄ = CT`.
#[derive(Debug, Clone)]
pub struct BalancedRealization {
    sys: StateSpace,
    hsv: DVector<f64>,
    transform: DMatrix<f64>,
}

impl BalancedRealization {
    /// Wraps an already balanced system. Only shape/ordering of `hsv` is
    /// checked here; use [`BalancedRealization::lyapunov_residuals`] to verify
    /// the balancing itself.
    pub fn from_parts(sys: StateSpace, hsv: DVector<f64>, transform: DMatrix<f64>) -> Result<Self> {
        let n = sys.order();
        if hsv.len() != n || transform.nrows() != n || transform.ncols() != n {
            return Err(Error::Dimension(format!(
                "balanced realization of order {n} needs {n} HSVs and an {n}x{n} transform"
            )));
        }
        if hsv.iter().any(|&h| !(h > 0.0)) {
            return Err(Error::invalid("hsv", "Hankel singular values must be positive"));
        }
        if hsv.as_slice().windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::invalid("hsv", "Hankel singular values must be non-increasing"));
        }
        Ok(Self { sys, hsv, transform })
    }

    pub fn sys(&self) -> &StateSpace {
        &self.sys
    }
    pub fn hsv(&self) -> &DVector<f64> {
        &self.hsv
    }
    pub fn transform(&self) -> &DMatrix<f64> {
        &self.transform
    }
    pub fn order(&self) -> usize {
        self.sys.order()
    }

    /// Frobenius residuals `(‖AᵀX + XA + CᵀC‖, ‖AX + XAᵀ + BBᵀ‖)` with `X = diag(hsv)`.
    pub fn lyapunov_residuals(&self) -> (f64, f64) {
        let x = DMatrix::from_diagonal(&self.hsv);
        let (a, b, c) = (self.sys.a(), self.sys.b(), self.sys.c());
        let obs = (a.transpose() * &x + &x * a + c.transpose() * c).norm();
        let ctrb = (a * &x + &x * a.transpose() + b * b.transpose()).norm();
        (obs, ctrb)
    }
}

/// Square-root balancing: `P = LLᵀ`, `LᵀQL = UΣ²Uᵀ`, `T = LUΣ^{-1/2}`.
pub fn balance(sys: &StateSpace) -> Result<BalancedRealization> {
    balance_with(sys, &Tolerances::default())
}

pub fn balance_with(sys: &StateSpace, tol: &Tolerances) -> Result<BalancedRealization> {
    let g = gramians(sys)?;
    let ratio = g.minimality_ratio();
    if ratio <= tol.minimality {
        return Err(Error::NotMinimal { ratio });
    }
    let l = g
        .controllability
        .clone()
        .cholesky()
        .ok_or(Error::NotMinimal { ratio: 0.0 })?
        .l();
    let m = l.transpose() * &g.observability * &l;
    let eig = symmetric_eigen(&m, tol)?;
    let n = sys.order();

    // Jacobi returns ascending order; HSVs are stored non-increasing.
    let mut hsv = DVector::zeros(n);
    let mut u = DMatrix::zeros(n, n);
    for k in 0..n {
        let src = n - 1 - k;
        let sigma_sq = eig.values[src];
        if !(sigma_sq > 0.0) {
            return Err(Error::NotMinimal { ratio: 0.0 });
        }
        hsv[k] = sigma_sq.sqrt();
        u.set_column(k, &eig.vectors.column(src));
    }
    let scale = DMatrix::from_diagonal(&hsv.map(|h| 1.0 / h.sqrt()));
    let t = l * u * scale;
    let balanced = sys.similarity(&t)?;
    BalancedRealization::from_parts(balanced, hsv, t)
}

/// Hankel singular values, non-increasing.
pub fn hankel_singular_values(sys: &StateSpace) -> Result<DVector<f64>> {
    Ok(balance(sys)?.hsv)
}
