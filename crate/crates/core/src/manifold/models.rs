use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mbam::ParamModel;
use crate::ode::{integrate, Control, OdeOptions};
use crate::params::{realize, BalancedParams};
use crate::lti::StateSpace;

pub const DEFAULT_TIMES: [f64; 3] = [0.3, 1.0, 3.0];
/// rad/s. One sample below the slow pole, one between the poles and one
/// well above the fast pole of the two-state examples, so that high-frequency
/// agreement (where truncation is exact) and low-frequency agreement (where
/// residualization is exact) both register in data space.
pub const DEFAULT_FREQUENCIES: [f64; 3] = [0.1, 10.0, 1000.0];

fn check_times(times: &[f64]) -> Result<()> {
    if times.len() < 3 {
        return Err(Error::invalid("times", format!("need at least 3 samples, got {}", times.len())));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("times", "must be finite, non-negative and increasing"));
    }
    Ok(())
}

fn nonnegative(p: &[f64]) -> Result<()> {
    for (i, &x) in p.iter().enumerate() {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::DomainViolation { index: i, value: x });
        }
    }
    Ok(())
}

/// Michaelis–Menten reaction `ẋ = −ρ₁x/(ρ₂ + x)`, `x(0) = x0`, sampled at `times`.
#[derive(Debug, Clone)]
pub struct MmrModel {
    x0: f64,
    times: Vec<f64>,
}

pub fn mmr_model(x0: f64, times: &[f64]) -> Result<MmrModel> {
    if !(x0 > 0.0 && x0.is_finite()) {
        return Err(Error::invalid("x0", "must be positive"));
    }
    check_times(times)?;
    Ok(MmrModel {
        x0,
        times: times.to_vec(),
    })
}

/// `x(t)` from the implicit solution `x + ρ₂ ln x = x0 + ρ₂ ln x0 − ρ₁ t`.
fn mmr_state(x0: f64, rho1: f64, rho2: f64, t: f64) -> f64 {
    if rho2 == 0.0 {
        return (x0 - rho1 * t).max(0.0);
    }
    let c = x0 + rho2 * x0.ln() - rho1 * t;
    // f(u) = eᵘ + ρ₂u − c is convex and increasing with f(ln x0) = ρ₁t ≥ 0,
    // so Newton from ln x0 decreases monotonically onto the root.
    let mut u = x0.ln();
    for _ in 0..500 {
        let eu = u.exp();
        let step = (eu + rho2 * u - c) / (eu + rho2);
        u -= step;
        if step.abs() <= 1e-15 * (1.0 + u.abs()) {
            break;
        }
    }
    u.exp()
}

impl MmrModel {
    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Same predictions by adaptive Runge–Kutta at tolerance 1e-10, as a
    /// cross-check of the closed form.
    pub fn predict_numerically(&self, p: &[f64]) -> Result<DVector<f64>> {
        nonnegative(p)?;
        let (rho1, rho2) = (p[0], p[1]);
        let opts = OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            ..OdeOptions::default()
        };
        let mut out = Vec::with_capacity(self.times.len());
        let mut t = 0.0;
        let mut x = DVector::from_element(1, self.x0);
        for &target in &self.times {
            let res = integrate(
                |_, y| Ok(y.map(|v| -rho1 * v / (rho2 + v))),
                t,
                x,
                target,
                &opts,
                |_, _| Ok(Control::Continue),
            )
            .map_err(|e| Error::IntegrationFailure(format!("MMR at {p:?}: {e}")))?;
            t = target;
            x = res.y;
            out.push(x[0]);
        }
        Ok(DVector::from_vec(out))
    }
}

impl ParamModel for MmrModel {
    fn n_params(&self) -> usize {
        2
    }
    fn data_dim(&self) -> usize {
        self.times.len()
    }
    fn predict(&self, p: &[f64]) -> Result<DVector<f64>> {
        if p.len() != 2 {
            return Err(Error::invalid("p", "MMR takes (rho1, rho2)"));
        }
        nonnegative(p)?;
        Ok(DVector::from_iterator(
            self.times.len(),
            self.times.iter().map(|&t| mmr_state(self.x0, p[0], p[1], t)),
        ))
    }
    fn log_scaled(&self) -> Vec<bool> {
        vec![true, true]
    }
    fn param_names(&self) -> Vec<String> {
        vec!["rho1".into(), "rho2".into()]
    }
}

/// One-parameter limits of the MMR model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmrLimit {
    /// `ρ₂ → 0`: `ẋ = −ρ₁`.
    Saturated,
    /// `ρ₁, ρ₂ → ∞` with `c = ρ₁/ρ₂` fixed: `ẋ = −c x`.
    Linear,
}

#[derive(Debug, Clone)]
pub struct MmrReducedModel {
    limit: MmrLimit,
    x0: f64,
    times: Vec<f64>,
}

pub fn mmr_reduced_model(limit: MmrLimit, x0: f64, times: &[f64]) -> Result<MmrReducedModel> {
    mmr_model(x0, times)?;
    Ok(MmrReducedModel {
        limit,
        x0,
        times: times.to_vec(),
    })
}

impl ParamModel for MmrReducedModel {
    fn n_params(&self) -> usize {
        1
    }
    fn data_dim(&self) -> usize {
        self.times.len()
    }
    fn predict(&self, p: &[f64]) -> Result<DVector<f64>> {
        nonnegative(p)?;
        let k = p[0];
        Ok(DVector::from_iterator(
            self.times.len(),
            self.times.iter().map(|&t| match self.limit {
                MmrLimit::Saturated => (self.x0 - k * t).max(0.0),
                MmrLimit::Linear => self.x0 * (-k * t).exp(),
            }),
        ))
    }
    fn log_scaled(&self) -> Vec<bool> {
        vec![true]
    }
    fn param_names(&self) -> Vec<String> {
        match self.limit {
            MmrLimit::Saturated => vec!["rho1".into()],
            MmrLimit::Linear => vec!["rho1/rho2".into()],
        }
    }
}

/// `y(t) = x₁ e^{−ρ₁t} + x₂ e^{−ρ₂t}`.
#[derive(Debug, Clone)]
pub struct TwoExpModel {
    x0: [f64; 2],
    times: Vec<f64>,
}

pub fn two_exp_model(x0: [f64; 2], times: &[f64]) -> Result<TwoExpModel> {
    check_times(times)?;
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("x0", "must be finite"));
    }
    Ok(TwoExpModel {
        x0,
        times: times.to_vec(),
    })
}

impl TwoExpModel {
    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

impl ParamModel for TwoExpModel {
    fn n_params(&self) -> usize {
        2
    }
    fn data_dim(&self) -> usize {
        self.times.len()
    }
    fn predict(&self, p: &[f64]) -> Result<DVector<f64>> {
        if p.len() != 2 {
            return Err(Error::invalid("p", "two-exponential model takes (rho1, rho2)"));
        }
        nonnegative(p)?;
        Ok(DVector::from_iterator(
            self.times.len(),
            self.times
                .iter()
                .map(|&t| self.x0[0] * (-p[0] * t).exp() + self.x0[1] * (-p[1] * t).exp()),
        ))
    }
    fn log_scaled(&self) -> Vec<bool> {
        vec![true, true]
    }
    fn param_names(&self) -> Vec<String> {
        vec!["rho1".into(), "rho2".into()]
    }
}

/// How a frequency response becomes a data vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResponseMode {
    /// `|Gᵢⱼ(iω)|` for every entry and frequency.
    #[default]
    Magnitude,
    /// Real and imaginary parts stacked.
    Complex,
}

/// Maps a system to its sampled frequency response.
#[derive(Debug, Clone)]
pub struct FrequencyDataMap {
    pub frequencies: Vec<f64>,
    pub mode: ResponseMode,
}

impl FrequencyDataMap {
    pub fn new(frequencies: &[f64], mode: ResponseMode) -> Result<Self> {
        if frequencies.is_empty() || frequencies.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("frequencies", "need finite, non-negative frequencies"));
        }
        Ok(FrequencyDataMap {
            frequencies: frequencies.to_vec(),
            mode,
        })
    }

    pub fn data_dim(&self, outputs: usize, inputs: usize) -> usize {
        let per = self.frequencies.len() * outputs * inputs;
        match self.mode {
            ResponseMode::Magnitude => per,
            ResponseMode::Complex => 2 * per,
        }
    }

    pub fn map(&self, sys: &StateSpace) -> Result<DVector<f64>> {
        let mut out = Vec::with_capacity(self.data_dim(sys.outputs(), sys.inputs()));
        for &w in &self.frequencies {
            let g: DMatrix<Complex64> = sys.eval_transfer(Complex64::new(0.0, w))?;
            for i in 0..g.nrows() {
                for j in 0..g.ncols() {
                    match self.mode {
                        ResponseMode::Magnitude => out.push(g[(i, j)].norm()),
                        ResponseMode::Complex => {
                            out.push(g[(i, j)].re);
                            out.push(g[(i, j)].im);
                        }
                    }
                }
            }
        }
        Ok(DVector::from_vec(out))
    }
}

/// Two-state balanced system with `(θ₂, r₂)` free and the rest fixed.
#[derive(Debug, Clone)]
pub struct TwoStateFreqModel {
    theta1: f64,
    r1: f64,
    beta: DMatrix<f64>,
    gamma: DMatrix<f64>,
    d: DMatrix<f64>,
    map: FrequencyDataMap,
}

pub fn two_state_freq_model(
    theta1: f64,
    r1: f64,
    beta: DMatrix<f64>,
    gamma: DMatrix<f64>,
    d: DMatrix<f64>,
    map: FrequencyDataMap,
) -> Result<TwoStateFreqModel> {
    if map.frequencies.len() < 3 {
        return Err(Error::invalid("frequencies", "need at least 3 frequencies"));
    }
    let model = TwoStateFreqModel {
        theta1,
        r1,
        beta,
        gamma,
        d,
        map,
    };
    // validate the fixed part once with an admissible free pair
    model.params(&[0.5 * theta1, 1.0])?;
    Ok(model)
}

impl TwoStateFreqModel {
    /// The SISO case with `β = γ = 1`.
    pub fn siso(theta1: f64, r1: f64, d: f64, map: FrequencyDataMap) -> Result<Self> {
        two_state_freq_model(
            theta1,
            r1,
            DMatrix::from_element(2, 1, 1.0),
            DMatrix::from_element(1, 2, 1.0),
            DMatrix::from_element(1, 1, d),
            map,
        )
    }

    pub fn params(&self, p: &[f64]) -> Result<BalancedParams> {
        if p.len() != 2 {
            return Err(Error::invalid("p", "two-state model takes (theta2, r2)"));
        }
        BalancedParams::new(
            DVector::from_vec(vec![self.theta1, p[0]]),
            DVector::from_vec(vec![self.r1, p[1]]),
            self.beta.clone(),
            self.gamma.clone(),
            self.d.clone(),
        )
    }

    pub fn system(&self, p: &[f64]) -> Result<StateSpace> {
        Ok(realize(&self.params(p)?)?.balanced.sys().clone())
    }

    pub fn data_map(&self) -> &FrequencyDataMap {
        &self.map
    }
}

impl ParamModel for TwoStateFreqModel {
    fn n_params(&self) -> usize {
        2
    }
    fn data_dim(&self) -> usize {
        self.map.data_dim(self.gamma.nrows(), self.beta.ncols())
    }
    fn predict(&self, p: &[f64]) -> Result<DVector<f64>> {
        self.map.map(&self.system(p)?)
    }
    fn domain(&self) -> Vec<(f64, f64)> {
        vec![(0.0, self.theta1), (0.0, f64::INFINITY)]
    }
    fn log_scaled(&self) -> Vec<bool> {
        vec![true, true]
    }
    fn param_names(&self) -> Vec<String> {
        vec!["theta2".into(), "r2".into()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mmr_closed_form_matches_runge_kutta() {
        let m = mmr_model(1.0, &DEFAULT_TIMES).unwrap();
        for p in [[1.0, 1.0], [0.3, 0.01], [5.0, 20.0], [0.2, 1e-6]] {
            let a = m.predict(&p).unwrap();
            let b = m.predict_numerically(&p).unwrap();
            assert!((&a - &b).abs().max() < 1e-8, "{p:?}: {a} vs {b}");
        }
    }

    #[test]
    fn mmr_limits() {
        let m = mmr_model(1.0, &DEFAULT_TIMES).unwrap();
        let c = 0.7;
        let y = m.predict(&[c * 1e6, 1e6]).unwrap();
        for (t, v) in DEFAULT_TIMES.iter().zip(y.iter()) {
            assert!((v - (-c * t).exp()).abs() < 1e-4);
        }
        let y = m.predict(&[0.2, 1e-8]).unwrap();
        for (t, v) in DEFAULT_TIMES.iter().zip(y.iter()) {
            assert!((v - (1.0 - 0.2 * t)).abs() < 1e-4);
        }
        assert_eq!(m.predict(&[0.0, 0.5]).unwrap(), DVector::from_element(3, 1.0));
        assert!(m.predict(&[-1.0, 1.0]).is_err());
        assert!(mmr_model(1.0, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn two_exp_edges() {
        let m = two_exp_model([1.0, 1.0], &DEFAULT_TIMES).unwrap();
        let y = m.predict(&[0.0, 0.8]).unwrap();
        let e = m.predict(&[0.8, 0.8]).unwrap();
        for (k, t) in DEFAULT_TIMES.iter().enumerate() {
            assert!((y[k] - (1.0 + (-0.8 * t).exp())).abs() < 1e-15);
            assert!((e[k] - 2.0 * (-0.8 * t).exp()).abs() < 1e-15);
        }
        assert_eq!(m.predict(&[0.0, 0.0]).unwrap(), DVector::from_element(3, 2.0));
    }

    #[test]
    fn two_state_limits_approach_truncation() {
        let map = FrequencyDataMap::new(&DEFAULT_FREQUENCIES, ResponseMode::Magnitude).unwrap();
        let m = TwoStateFreqModel::siso(1.0, 1.0, 0.0, map.clone()).unwrap();
        let bt = StateSpace::from_rows(1, 1, 1, &[-0.5], &[1.0], &[1.0], &[0.0]).unwrap();
        let bt_point = map.map(&bt).unwrap();
        let mut last = f64::INFINITY;
        for eps in [1e-2, 1e-4, 1e-6] {
            let d = (m.predict(&[eps, 0.8]).unwrap() - &bt_point).norm();
            assert!(d < last);
            last = d;
        }
        assert!(last < 1e-5);
        assert!(matches!(m.predict(&[1.0, 1.0]), Err(Error::DegenerateHsv { .. }) | Err(Error::InvalidInput { .. })));
        let complex = FrequencyDataMap::new(&DEFAULT_FREQUENCIES, ResponseMode::Complex).unwrap();
        let mc = TwoStateFreqModel::siso(1.0, 1.0, 0.0, complex).unwrap();
        assert_eq!(mc.data_dim(), 6);
        assert_eq!(mc.predict(&[0.7, 8.0]).unwrap().len(), 6);
    }
}
