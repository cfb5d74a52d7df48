//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

use lti_mbam::mbam::FnModel;

/// `(I ⊗ A + A ⊗ I) vec X = −vec Q` through nalgebra's own Kronecker product
/// and full-pivot LU.
pub fn kronecker_lyapunov(a: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let k = eye.kronecker(a) + a.kronecker(&eye);
    let rhs = DVector::from_column_slice((-q).as_slice());
    let x = k.full_piv_lu().solve(&rhs).expect("nonsingular Kronecker operator");
    DMatrix::from_column_slice(n, n, x.as_slice())
}

/// `y_i = Σ_k c_k exp(−p_k t_i)` with analytic first and second derivatives.
pub struct ExpSum {
    pub times: Vec<f64>,
    pub coeffs: Vec<f64>,
}

impl ExpSum {
    pub fn jac(&self, p: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.times.len(), p.len(), |i, k| {
            let t = self.times[i];
            -t * self.coeffs[k] * (-p[k] * t).exp()
        })
    }

    /// `∂²y_m / ∂p_j ∂p_k`, diagonal in `(j, k)`.
    pub fn hess(&self, p: &[f64], m: usize) -> DMatrix<f64> {
        let t = self.times[m];
        DMatrix::from_fn(p.len(), p.len(), |j, k| {
            if j == k {
                t * t * self.coeffs[k] * (-p[k] * t).exp()
            } else {
                0.0
            }
        })
    }

    pub fn model(&self) -> FnModel<impl Fn(&[f64]) -> lti_mbam::Result<DVector<f64>> + Sync + '_> {
        FnModel::new(self.coeffs.len(), self.times.len(), move |p: &[f64]| {
            Ok(DVector::from_fn(self.times.len(), |i, _| {
                let t = self.times[i];
                p.iter().zip(&self.coeffs).map(|(pk, c)| c * (-pk * t).exp()).sum()
            }))
        })
        .unwrap()
    }

    /// `aⁱ = −Γⁱⱼₖ vʲ vᵏ` with `Γⁱⱼₖ = gⁱˡ Σ_m J_ml ∂²y_m/∂pʲ∂pᵏ`.
    pub fn christoffel_acceleration(&self, p: &[f64], v: &[f64]) -> DVector<f64> {
        let n = p.len();
        let j = self.jac(p);
        let g_inv = (j.transpose() * &j).try_inverse().unwrap();
        let hs: Vec<DMatrix<f64>> = (0..self.times.len()).map(|m| self.hess(p, m)).collect();
        let mut gamma_lower = vec![DMatrix::zeros(n, n); n];
        for (l, gl) in gamma_lower.iter_mut().enumerate() {
            for (m, h) in hs.iter().enumerate() {
                *gl += h * j[(m, l)];
            }
        }
        DVector::from_fn(n, |i, _| {
            let mut acc = 0.0;
            for (l, gl) in gamma_lower.iter().enumerate() {
                for a in 0..n {
                    for b in 0..n {
                        acc += g_inv[(i, l)] * gl[(a, b)] * v[a] * v[b];
                    }
                }
            }
            -acc
        })
    }
}
