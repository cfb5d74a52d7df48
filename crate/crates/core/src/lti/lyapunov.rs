use nalgebra::{DMatrix, Schur};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{lu_solve, symmetric_eigen};
use crate::lti::StateSpace;

/// Solves `A X + X Aᵀ = −Q` through the dense `n² × n²` vectorized system
/// `(I ⊗ A + A ⊗ I) vec(X) = −vec(Q)`.
///
/// The result is symmetrized and its residual checked against
/// `tol.lyapunov_residual · max(1, ‖Q‖_F)`.
pub fn solve_lyapunov(a: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    solve_lyapunov_with(a, q, &Tolerances::default())
}

pub fn solve_lyapunov_with(a: &DMatrix<f64>, q: &DMatrix<f64>, tol: &Tolerances) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if !a.is_square() || q.nrows() != n || q.ncols() != n {
        return Err(Error::Dimension(format!(
            "Lyapunov solve needs square A and Q of equal size, got {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            q.nrows(),
            q.ncols()
        )));
    }
    let nn = n * n;
    // vec() is column-major: X[(k, l)] lives at k + l·n.
    let mut kron = DMatrix::<f64>::zeros(nn, nn);
    for j in 0..n {
        for i in 0..n {
            let row = i + j * n;
            // (A X)_{ij} = Σ_k A_ik X_kj
            for k in 0..n {
                kron[(row, k + j * n)] += a[(i, k)];
            }
            // (X Aᵀ)_{ij} = Σ_l X_il A_jl
            for l in 0..n {
                kron[(row, i + l * n)] += a[(j, l)];
            }
        }
    }
    let rhs = DMatrix::from_iterator(nn, 1, q.iter().map(|x| -x));
    let vec_x = lu_solve(kron, &rhs, tol.singular_pivot, "Lyapunov operator")?;
    let x = DMatrix::from_column_slice(n, n, vec_x.as_slice());
    let x = (&x + x.transpose()) * 0.5;

    let residual = (a * &x + &x * a.transpose() + q).norm();
    let bound = tol.lyapunov_residual * q.norm().max(1.0);
    // Residual scales with ‖X‖ as well; large X near marginal stability still
    // counts as solved if the relative residual is at roundoff level.
    let scale = (a.norm() * x.norm()).max(1.0);
    if residual > bound && residual > tol.lyapunov_residual * scale {
        return Err(Error::SingularSystem(format!(
            "Lyapunov residual {residual:.3e} exceeds {bound:.3e}"
        )));
    }
    Ok(x)
}

/// Controllability and observability Gramians of a stable system.
#[derive(Debug, Clone)]
pub struct Gramians {
    /// `A P + P Aᵀ = −B Bᵀ`
    pub controllability: DMatrix<f64>,
    /// `Aᵀ Q + Q A = −Cᵀ C`
    pub observability: DMatrix<f64>,
}

impl Gramians {
    /// Smallest `λ_min / λ_max` over the two Gramians.
    pub fn minimality_ratio(&self) -> f64 {
        let tol = Tolerances::default();
        [&self.controllability, &self.observability]
            .iter()
            .map(|g| match symmetric_eigen(g, &tol) {
                Ok(e) => {
                    let n = e.values.len();
                    let max = e.values[n - 1];
                    if max > 0.0 {
                        e.values[0] / max
                    } else {
                        0.0
                    }
                }
                Err(_) => 0.0,
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_minimal(&self, tol: &Tolerances) -> bool {
        self.minimality_ratio() > tol.minimality
    }
}

/// Gramians of `sys`. Fails with [`Error::Unstable`] if the system is not
/// asymptotically stable; non-minimality is only flagged via
/// [`Gramians::is_minimal`].
pub fn gramians(sys: &StateSpace) -> Result<Gramians> {
    if !is_stable(sys) {
        return Err(Error::Unstable);
    }
    let a = sys.a();
    let p = solve_lyapunov(a, &(sys.b() * sys.b().transpose()))?;
    let q = solve_lyapunov(&a.transpose(), &(sys.c().transpose() * sys.c()))?;
    Ok(Gramians {
        controllability: p,
        observability: q,
    })
}

/// Lyapunov stability test: `A` is Hurwitz iff `AᵀX + XA = −I` has a positive
/// definite solution.
pub fn is_stable(sys: &StateSpace) -> bool {
    is_hurwitz(sys.a())
}

/// All eigenvalues strictly in the open left half plane.
///
/// Eigenvalues come from the real Schur form. If the QR iteration does not
/// converge the test falls back to positivity of the solution of
/// `AᵀX + XA = −I`, which is less reliable when the slowest and fastest poles
/// are many decades apart.
pub fn is_hurwitz(a: &DMatrix<f64>) -> bool {
    if a.iter().any(|v| !v.is_finite()) {
        return false;
    }
    match Schur::try_new(a.clone(), f64::EPSILON, 10_000) {
        Some(schur) => schur.complex_eigenvalues().iter().all(|l| l.re < 0.0),
        None => lyapunov_positive(a),
    }
}

fn lyapunov_positive(a: &DMatrix<f64>) -> bool {
    let n = a.nrows();
    let x = match solve_lyapunov(&a.transpose(), &DMatrix::identity(n, n)) {
        Ok(x) => x,
        Err(_) => return false,
    };
    if x.iter().any(|v| !v.is_finite()) {
        return false;
    }
    // Cholesky alone accepts tiny negative pivots as positive through
    // roundoff; also require the diagonal to be positive.
    (0..n).all(|i| x[(i, i)] > 0.0) && x.cholesky().is_some()
}
