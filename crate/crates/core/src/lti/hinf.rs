use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{golden_section, lu_solve, max_singular_value};
use crate::lti::{is_stable, StateSpace};

/// Peak gain of a frequency response and where it occurs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakGain {
    pub norm: f64,
    /// rad/s; `0` for a DC peak, `f64::INFINITY` when the feedthrough dominates.
    pub frequency: f64,
}

fn gain(sys: &StateSpace, w: f64) -> Result<f64> {
    Ok(max_singular_value(&sys.eval_transfer(Complex64::new(0.0, w))?))
}

/// Bounds on the magnitude of the eigenvalues of `A` that avoid an
/// eigen-decomposition: `1/‖A⁻¹‖_F ≤ |λ| ≤ ‖A‖_F`.
fn spectral_bounds(a: &DMatrix<f64>) -> (f64, f64) {
    let n = a.nrows();
    let hi = a.norm().max(f64::MIN_POSITIVE);
    let lo = lu_solve(a.clone(), &DMatrix::identity(n, n), 1e-15, "A inverse")
        .map(|inv| 1.0 / inv.norm())
        .unwrap_or(hi);
    (lo, hi)
}

fn log_grid(lo: f64, hi: f64, min_points: usize) -> Vec<f64> {
    let decades = (hi / lo).log10().max(0.0);
    let count = min_points.max((40.0 * decades).ceil() as usize).max(2);
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

fn grid_peak(sys: &StateSpace, grid: &[f64], tol: &Tolerances) -> Result<PeakGain> {
    let gains = grid.iter().map(|&w| gain(sys, w)).collect::<Result<Vec<_>>>()?;
    let (best, &best_gain) = gains
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid is non-empty");
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(grid.len() - 1)];
    if lo == hi {
        return Ok(PeakGain {
            norm: best_gain,
            frequency: grid[best],
        });
    }
    // Golden-section on log ω; the interval width bound is far below the
    // relative tolerance because the peak is flat to second order.
    let width = (tol.hinf_rel * 1e-4).max(1e-12);
    let (lw, neg) = golden_section(|lw| Ok(-gain(sys, lw.exp())?), lo.ln(), hi.ln(), width)?;
    if -neg > best_gain {
        Ok(PeakGain {
            norm: -neg,
            frequency: lw.exp(),
        })
    } else {
        Ok(PeakGain {
            norm: best_gain,
            frequency: grid[best],
        })
    }
}

/// H∞ norm `sup_ω σ_max(G(iω))` of a stable system.
///
/// Coarse log grid over `[1e-4, 1e4]` scaled by bounds on the spectrum of `A`,
/// then golden-section refinement around the best grid point. DC and the
/// feedthrough limit are checked explicitly. Peaks narrower than the grid
/// spacing can be missed.
pub fn hinf_norm(sys: &StateSpace) -> Result<PeakGain> {
    hinf_norm_with(sys, &Tolerances::default())
}

pub fn hinf_norm_with(sys: &StateSpace, tol: &Tolerances) -> Result<PeakGain> {
    if !is_stable(sys) {
        return Err(Error::Unstable);
    }
    let (lo, hi) = spectral_bounds(sys.a());
    let grid = log_grid(1e-4 * lo.min(1.0), 1e4 * hi.max(1.0), tol.hinf_grid_points);
    let mut peak = grid_peak(sys, &grid, tol)?;

    let dc = gain(sys, 0.0)?;
    if dc >= peak.norm {
        peak = PeakGain {
            norm: dc,
            frequency: 0.0,
        };
    }
    let d = max_singular_value(&sys.d().map(|x| Complex64::new(x, 0.0)));
    if d > peak.norm {
        peak = PeakGain {
            norm: d,
            frequency: f64::INFINITY,
        };
    }
    Ok(peak)
}

/// Peak gain restricted to the band `[lo, hi]` rad/s.
pub fn hinf_norm_band(sys: &StateSpace, lo: f64, hi: f64) -> Result<PeakGain> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::invalid("band", "need 0 < lo < hi"));
    }
    if !is_stable(sys) {
        return Err(Error::Unstable);
    }
    let tol = Tolerances::default();
    grid_peak(sys, &log_grid(lo, hi, tol.hinf_grid_points), &tol)
}
