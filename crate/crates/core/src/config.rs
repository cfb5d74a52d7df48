//! Default numerical tolerances, collected in one place.

/// Tolerances shared by the linear-system routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Lyapunov residual bound, relative to `max(1, ‖Q‖_F)`.
    pub lyapunov_residual: f64,
    /// LU pivot ratio below which a linear system is treated as singular.
    pub singular_pivot: f64,
    /// Gramian eigenvalue ratio below which a system is flagged non-minimal.
    pub minimality: f64,
    /// Off-diagonal Frobenius threshold of the Jacobi eigensolver (relative).
    pub jacobi_offdiag: f64,
    /// Sweep cap of the Jacobi eigensolver.
    pub jacobi_max_sweeps: usize,
    /// Minimum separation `|θᵢ² − θⱼ²| / θ₁²` of Hankel singular values.
    pub hsv_separation: f64,
    /// Lemma-1 deviation accepted when extracting balanced parameters (relative).
    pub lemma1: f64,
    /// Relative accuracy target of the H∞ norm search.
    pub hinf_rel: f64,
    /// Number of log-spaced points of the H∞ coarse grid.
    pub hinf_grid_points: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            lyapunov_residual: 1e-10,
            singular_pivot: 1e-13,
            minimality: 1e-10,
            jacobi_offdiag: 1e-12,
            jacobi_max_sweeps: 100,
            hsv_separation: 1e-12,
            lemma1: 1e-8,
            hinf_rel: 1e-4,
            hinf_grid_points: 400,
        }
    }
}
