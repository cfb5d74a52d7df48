use serde::Serialize;

use super::{GeodesicTrace, Termination};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LimitKind {
    ToZero,
    ToInfinity,
    Finite,
}

/// Two parameters diverging together with a converged ratio.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantCandidate {
    pub i: usize,
    pub j: usize,
    /// `pᵢ/pⱼ` at the end of the trace.
    pub ratio: f64,
    /// Spread of `ln(pᵢ/pⱼ)` over the tail window.
    pub log_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitClassification {
    pub kinds: Vec<LimitKind>,
    pub invariants: Vec<InvariantCandidate>,
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    /// A parameter is diverging once it moved this factor away from its start.
    pub factor: f64,
    /// Largest allowed spread of `ln(pᵢ/pⱼ)` over the tail for an invariant.
    pub ratio_drift: f64,
    /// Fraction of trace points forming the tail window.
    pub tail_fraction: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            factor: 1e4,
            ratio_drift: 0.01,
            tail_fraction: 0.2,
        }
    }
}

/// Labels each parameter `ToZero`, `ToInfinity` or `Finite` from the end of
/// the trace and looks for converged ratios among co-diverging pairs.
pub fn classify_limit(trace: &GeodesicTrace, opts: &ClassifyOptions) -> Result<LimitClassification> {
    let len = trace.len();
    if len < 2 {
        return Err(Error::Inconclusive("trace has fewer than two points".into()));
    }
    let n = trace.params[0].len();
    let tail_start = ((len as f64) * (1.0 - opts.tail_fraction)).floor() as usize;
    let tail_start = tail_start.min(len - 2);
    let first = &trace.params[0];
    let last = &trace.params[len - 1];
    let window = &trace.params[tail_start];

    let kinds: Vec<LimitKind> = (0..n)
        .map(|i| {
            let (p0, pe, pw) = (first[i].abs(), last[i].abs(), window[i].abs());
            if pe < p0 / opts.factor && pe < pw {
                LimitKind::ToZero
            } else if pe > p0 * opts.factor && pe > pw {
                LimitKind::ToInfinity
            } else {
                LimitKind::Finite
            }
        })
        .collect();

    if trace.termination == Termination::MaxTau && kinds.iter().all(|k| *k == LimitKind::Finite) {
        return Err(Error::Inconclusive(
            "reached tau_max without any parameter diverging".into(),
        ));
    }

    let mut invariants = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if kinds[i] == LimitKind::Finite || kinds[i] != kinds[j] {
                continue;
            }
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for p in &trace.params[tail_start..] {
                let r = (p[i].abs() / p[j].abs()).ln();
                lo = lo.min(r);
                hi = hi.max(r);
            }
            let log_drift = hi - lo;
            if log_drift < opts.ratio_drift {
                invariants.push(InvariantCandidate {
                    i,
                    j,
                    ratio: last[i] / last[j],
                    log_drift,
                });
            }
        }
    }
    Ok(LimitClassification { kinds, invariants })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn synthetic(f: impl Fn(f64) -> Vec<f64>, termination: Termination) -> GeodesicTrace {
        let taus: Vec<f64> = (0..=200).map(|k| k as f64 * 0.05).collect();
        let params: Vec<DVector<f64>> = taus.iter().map(|&t| DVector::from_vec(f(t))).collect();
        let n = params[0].len();
        GeodesicTrace {
            param_names: (1..=n).map(|i| format!("p_{i}")).collect(),
            velocities: params.iter().map(|p| p * 0.0).collect(),
            data_points: params.clone(),
            speeds: vec![1.0; taus.len()],
            taus,
            params,
            termination,
            classification: None,
        }
    }

    #[test]
    fn co_growing_pair_has_unit_ratio() {
        let t = synthetic(|t| vec![t.exp(), t.exp()], Termination::ParamDiverged);
        let c = classify_limit(&t, &ClassifyOptions::default()).unwrap();
        assert_eq!(c.kinds, vec![LimitKind::ToInfinity, LimitKind::ToInfinity]);
        assert_eq!(c.invariants.len(), 1);
        assert!((c.invariants[0].ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_to_zero_one_finite() {
        let t = synthetic(|t| vec![1.0 + 0.01 * t, (-2.0 * t).exp()], Termination::VelocityBlowup);
        let c = classify_limit(&t, &ClassifyOptions::default()).unwrap();
        assert_eq!(c.kinds, vec![LimitKind::Finite, LimitKind::ToZero]);
        assert!(c.invariants.is_empty());
    }

    #[test]
    fn drifting_ratio_is_not_an_invariant() {
        let t = synthetic(|t| vec![t.exp(), (1.5 * t).exp()], Termination::ParamDiverged);
        let c = classify_limit(&t, &ClassifyOptions::default()).unwrap();
        assert_eq!(c.kinds, vec![LimitKind::ToInfinity, LimitKind::ToInfinity]);
        assert!(c.invariants.is_empty());
    }

    #[test]
    fn bounded_max_tau_is_inconclusive() {
        let t = synthetic(|t| vec![1.0 + t.sin() * 0.1], Termination::MaxTau);
        assert!(matches!(
            classify_limit(&t, &ClassifyOptions::default()),
            Err(Error::Inconclusive(_))
        ));
    }
}
