//! Seeded generators of random test systems.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::lti::StateSpace;
use crate::params::BalancedParams;

/// The one generator type used for all reproducible randomness.
pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Random stable system: `A = R − (‖R‖_∞ + δ) I` with Gaussian `R`, so every
/// Gershgorin disc lies in the open left half plane; `B`, `C`, `D` Gaussian
/// (generically minimal).
pub fn random_stable_system(rng: &mut impl Rng, n: usize, m: usize, p: usize) -> Result<StateSpace> {
    let r = gaussian(rng, n, n);
    let row_sum = (0..n)
        .map(|i| r.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let shift = row_sum + rng.random_range(0.1..1.0);
    let a = r - DMatrix::identity(n, n) * shift;
    StateSpace::new(a, gaussian(rng, n, m), gaussian(rng, p, n), gaussian(rng, p, m))
}

/// Random invertible transform with condition number bounded by roughly 10.
pub fn random_transform(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let g = gaussian(rng, n, n);
    let q = g.qr().q();
    let s = DVector::from_fn(n, |_, _| rng.random_range(0.5..5.0));
    &q * DMatrix::from_diagonal(&s) * gaussian_orthogonal(rng, n)
}

fn gaussian_orthogonal(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    gaussian(rng, n, n).qr().q()
}

fn unit(v: DVector<f64>) -> DVector<f64> {
    let n = v.norm();
    v / n
}

/// Random valid balanced parameters: distinct `θ` on a log scale in
/// `[1e-2, 10]`, random unit directions, and `rᵢ = √(2θᵢλᵢ)` with a decay
/// rate `λᵢ = −āᵢᵢ` log-uniform in `[0.1, 10]`.
///
/// Drawing `r` directly lets `āᵢᵢ = −rᵢ²/2θᵢ` range over six decades, which
/// puts poles within 1e-5 of the imaginary axis next to poles near 100; the
/// Gramians of such systems are only determined to about 1e-8.
pub fn random_balanced_params(rng: &mut impl Rng, n: usize, m: usize, p: usize) -> Result<BalancedParams> {
    let mut theta: Vec<f64> = Vec::with_capacity(n);
    while theta.len() < n {
        let t = 10f64.powf(rng.random_range(-2.0..1.0));
        // keep θᵢ² well separated so αᵢⱼ stays moderate
        if theta.iter().all(|&s| (s - t).abs() > 0.2 * s.max(t)) {
            theta.push(t);
        }
    }
    theta.sort_by(|a, b| b.total_cmp(a));
    let r = DVector::from_fn(n, |i, _| (2.0 * theta[i] * 10f64.powf(rng.random_range(-1.0..1.0))).sqrt());
    let mut beta = DMatrix::zeros(n, m);
    let mut gamma = DMatrix::zeros(p, n);
    for i in 0..n {
        let b = unit(DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal)));
        beta.set_row(i, &b.transpose());
        let g = unit(DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal)));
        gamma.set_column(i, &g);
    }
    BalancedParams::new(DVector::from_vec(theta), r, beta, gamma, gaussian(rng, p, m))
}

/// Random stable minimal system with known Hankel singular values: a balanced
/// realization of [`random_balanced_params`] seen through [`random_transform`].
///
/// Gaussian draws like [`random_stable_system`] are minimal only in exact
/// arithmetic; their Hankel singular values often decay below roundoff, so
/// tests that need numerically minimal systems use this generator.
pub fn random_minimal_system(rng: &mut impl Rng, n: usize, m: usize, p: usize) -> Result<StateSpace> {
    let params = random_balanced_params(rng, n, m, p)?;
    let balanced = crate::params::realize(&params)?.balanced;
    balanced.sys().similarity(&random_transform(rng, n))
}
