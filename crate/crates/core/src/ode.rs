//! Adaptive Dormand–Prince 5(4) integrator for `y' = f(t, y)`.

use nalgebra::DVector;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h0: Option<f64>,
    pub h_max: f64,
    /// Steps shorter than `h_min · max(1, |t|)` count as underflow.
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-8,
            atol: 1e-10,
            h0: None,
            h_max: f64::INFINITY,
            h_min: 1e-14,
            max_steps: 1_000_000,
        }
    }
}

/// What the observer wants after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone)]
pub struct OdeOutcome {
    pub t: f64,
    pub y: DVector<f64>,
    pub steps: usize,
    pub rejected: usize,
    /// True when the observer stopped the integration before `t_end`.
    pub stopped: bool,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn error_norm(err: &DVector<f64>, y0: &DVector<f64>, y1: &DVector<f64>, opts: &OdeOptions) -> f64 {
    let n = err.len().max(1) as f64;
    let s: f64 = err
        .iter()
        .zip(y0.iter().zip(y1.iter()))
        .map(|(e, (a, b))| {
            let sc = opts.atol + opts.rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (s / n).sqrt()
}

/// Integrates from `t0` to `t_end` (`t_end > t0`).
///
/// `observer` sees the initial point and every accepted step and may stop the
/// integration early. Errors returned by `rhs` or `observer` abort the run.
pub fn integrate<F, O>(
    mut rhs: F,
    t0: f64,
    y0: DVector<f64>,
    t_end: f64,
    opts: &OdeOptions,
    mut observer: O,
) -> Result<OdeOutcome>
where
    F: FnMut(f64, &DVector<f64>) -> Result<DVector<f64>>,
    O: FnMut(f64, &DVector<f64>) -> Result<Control>,
{
    if !(t_end >= t0) {
        return Err(Error::invalid("t_end", format!("must be >= t0 = {t0}, got {t_end}")));
    }
    let mut t = t0;
    let mut y = y0;
    let outcome = |t: f64, y: DVector<f64>, steps, rejected, stopped| OdeOutcome {
        t,
        y,
        steps,
        rejected,
        stopped,
    };
    if observer(t, &y)? == Control::Stop {
        return Ok(outcome(t, y, 0, 0, true));
    }
    if t_end == t0 {
        return Ok(outcome(t, y, 0, 0, false));
    }

    let mut k1 = rhs(t, &y)?;
    let mut h = match opts.h0 {
        Some(h) => h,
        None => {
            let scale = y.iter().map(|v| opts.atol + opts.rtol * v.abs());
            let d0 = y.iter().zip(scale.clone()).map(|(v, s)| (v / s).powi(2)).sum::<f64>().sqrt();
            let d1 = k1.iter().zip(scale).map(|(v, s)| (v / s).powi(2)).sum::<f64>().sqrt();
            if d0 < 1e-5 || d1 < 1e-5 {
                1e-6
            } else {
                0.01 * d0 / d1
            }
        }
    };
    h = h.min(opts.h_max).min(t_end - t0);

    let (mut steps, mut rejected) = (0usize, 0usize);
    while t < t_end {
        if steps + rejected >= opts.max_steps {
            return Err(Error::IntegrationFailure(format!("step budget exhausted at t = {t}")));
        }
        if h < opts.h_min * t.abs().max(1.0) {
            return Err(Error::StepFailure { t });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let k2 = rhs(t + C2 * h, &(&y + &k1 * (h * A21)))?;
        let k3 = rhs(t + C3 * h, &(&y + (&k1 * A31 + &k2 * A32) * h))?;
        let k4 = rhs(t + C4 * h, &(&y + (&k1 * A41 + &k2 * A42 + &k3 * A43) * h))?;
        let k5 = rhs(t + C5 * h, &(&y + (&k1 * A51 + &k2 * A52 + &k3 * A53 + &k4 * A54) * h))?;
        let k6 = rhs(
            t + h,
            &(&y + (&k1 * A61 + &k2 * A62 + &k3 * A63 + &k4 * A64 + &k5 * A65) * h),
        )?;
        let y_new = &y + (&k1 * B1 + &k3 * B3 + &k4 * B4 + &k5 * B5 + &k6 * B6) * h;
        let k7 = rhs(t + h, &y_new)?;
        let err = (&k1 * E1 + &k3 * E3 + &k4 * E4 + &k5 * E5 + &k6 * E6 + &k7 * E7) * h;
        let en = error_norm(&err, &y, &y_new, opts);

        if en <= 1.0 && en.is_finite() {
            t = if last { t_end } else { t + h };
            y = y_new;
            k1 = k7;
            steps += 1;
            if observer(t, &y)? == Control::Stop {
                return Ok(outcome(t, y, steps, rejected, true));
            }
            let factor = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h * factor).min(opts.h_max);
        } else {
            rejected += 1;
            let factor = if en.is_finite() { (0.9 * en.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h *= factor;
        }
    }
    Ok(outcome(t, y, steps, rejected, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let out = integrate(
            |_, y| Ok(-y),
            0.0,
            DVector::from_element(1, 1.0),
            3.0,
            &OdeOptions::default(),
            |_, _| Ok(Control::Continue),
        )
        .unwrap();
        assert_eq!(out.t, 3.0);
        assert!((out.y[0] - (-3.0f64).exp()).abs() < 1e-9);
        assert!(!out.stopped);
    }

    #[test]
    fn harmonic_oscillator_conserves_energy() {
        let out = integrate(
            |_, y| Ok(DVector::from_vec(vec![y[1], -y[0]])),
            0.0,
            DVector::from_vec(vec![1.0, 0.0]),
            20.0,
            &OdeOptions::default(),
            |_, _| Ok(Control::Continue),
        )
        .unwrap();
        assert!((out.y[0] - 20f64.cos()).abs() < 1e-7);
        assert!((out.y[1] + 20f64.sin()).abs() < 1e-7);
    }

    #[test]
    fn observer_can_stop() {
        let mut seen = Vec::new();
        let out = integrate(
            |_, _| Ok(DVector::from_element(1, 1.0)),
            0.0,
            DVector::from_element(1, 0.0),
            10.0,
            &OdeOptions {
                h_max: 0.5,
                ..OdeOptions::default()
            },
            |t, _| {
                seen.push(t);
                Ok(if t >= 2.0 { Control::Stop } else { Control::Continue })
            },
        )
        .unwrap();
        assert!(out.stopped);
        assert!(out.t >= 2.0 && out.t < 10.0);
        assert_eq!(seen[0], 0.0);
        assert!(seen.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn finite_time_blowup_is_a_step_failure() {
        // y' = y², y(0) = 1 blows up at t = 1
        let res = integrate(
            |_, y| Ok(y.map(|v| v * v)),
            0.0,
            DVector::from_element(1, 1.0),
            2.0,
            &OdeOptions::default(),
            |_, _| Ok(Control::Continue),
        );
        assert!(matches!(res, Err(Error::StepFailure { .. }) | Err(Error::IntegrationFailure(_))), "{res:?}");
    }

    #[test]
    fn rhs_errors_propagate() {
        let res = integrate(
            |t, y| {
                if t > 0.5 {
                    Err(Error::DomainViolation { index: 0, value: y[0] })
                } else {
                    Ok(-y)
                }
            },
            0.0,
            DVector::from_element(1, 1.0),
            1.0,
            &OdeOptions::default(),
            |_, _| Ok(Control::Continue),
        );
        assert!(matches!(res, Err(Error::DomainViolation { .. })));
    }
}
