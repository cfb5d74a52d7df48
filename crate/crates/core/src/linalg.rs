//! Small dense linear-algebra helpers: a cyclic Jacobi symmetric eigensolver,
//! a pivot-checked LU solve and a golden-section minimizer.

use nalgebra::{ComplexField, DMatrix, DVector};

use crate::config::Tolerances;
use crate::error::{Error, Result};

/// Eigen-decomposition of a symmetric matrix, eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: DVector<f64>,
    /// Column `i` is the unit eigenvector of `values[i]`.
    pub vectors: DMatrix<f64>,
    pub sweeps: usize,
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi rotations on a symmetric matrix.
///
/// Sweeps until the off-diagonal Frobenius mass drops below
/// `tol.jacobi_offdiag · ‖A‖_F`, then runs one polishing sweep (convergence is
/// quadratic, so this takes the remaining off-diagonal mass to roundoff).
pub fn symmetric_eigen(a: &DMatrix<f64>, tol: &Tolerances) -> Result<SymmetricEigen> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "symmetric_eigen needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    let mut m = (a + a.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = m.norm();
    let mut sweeps = 0;
    let mut polish = false;

    if scale > 0.0 {
        loop {
            let off = off_diagonal_norm(&m);
            if off <= tol.jacobi_offdiag * scale || off == 0.0 {
                if polish {
                    break;
                }
                polish = true;
            }
            if sweeps >= tol.jacobi_max_sweeps {
                break;
            }
            sweeps += 1;
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = m[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let app = m[(p, p)];
                    let aqq = m[(q, q)];
                    // Rotation angle from tan(2φ) = 2 a_pq / (a_qq − a_pp),
                    // taking the smaller root for stability.
                    let tau = (aqq - app) / (2.0 * apq);
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let t = if tau == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;

                    for k in 0..n {
                        let mkp = m[(k, p)];
                        let mkq = m[(k, q)];
                        m[(k, p)] = c * mkp - s * mkq;
                        m[(k, q)] = s * mkp + c * mkq;
                    }
                    for k in 0..n {
                        let mpk = m[(p, k)];
                        let mqk = m[(q, k)];
                        m[(p, k)] = c * mpk - s * mqk;
                        m[(q, k)] = s * mpk + c * mqk;
                    }
                    m[(p, q)] = 0.0;
                    m[(q, p)] = 0.0;
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| m[(i, i)]));
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

/// LU solve with partial pivoting that refuses numerically singular systems.
///
/// `what` names the system in the error message.
pub fn lu_solve<T>(a: DMatrix<T>, b: &DMatrix<T>, pivot_tol: f64, what: &str) -> Result<DMatrix<T>>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let n = a.nrows();
    let lu = a.lu();
    let u = lu.u();
    let mut max_pivot: f64 = 0.0;
    let mut min_pivot = f64::INFINITY;
    for i in 0..n {
        let p = u[(i, i)].modulus();
        max_pivot = max_pivot.max(p);
        min_pivot = min_pivot.min(p);
    }
    if !(max_pivot > 0.0) || min_pivot <= pivot_tol * max_pivot {
        return Err(Error::SingularSystem(format!(
            "{what}: pivot ratio {:.3e}",
            if max_pivot > 0.0 { min_pivot / max_pivot } else { 0.0 }
        )));
    }
    lu.solve(b)
        .ok_or_else(|| Error::SingularSystem(format!("{what}: zero pivot")))
}

/// Golden-section minimization of `f` on `[lo, hi]` down to an interval width
/// of `tol`. Returns `(argmin, min)`.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    // 200 iterations shrink any finite interval below f64 resolution.
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Largest singular value of a complex matrix.
pub fn max_singular_value(g: &DMatrix<num_complex::Complex64>) -> f64 {
    if g.nrows() == 1 && g.ncols() == 1 {
        return g[(0, 0)].norm();
    }
    g.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}
