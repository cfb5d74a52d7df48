use std::io::Write;

use nalgebra::DVector;
use serde::Serialize;
use serde_json::{json, Value};

use super::{
    acceleration_from_jacobian, chart_jacobian, classify_limit, fim_condition, initial_velocity, Chart,
    ClassifyOptions, LimitClassification, ParamModel, FIM_CONDITION_MAX,
};
use crate::error::{Error, Result};
use crate::ode::{integrate, Control, OdeOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Termination {
    /// Some `|log₁₀(pᵢ/pᵢ(0))|` exceeded the bound.
    ParamDiverged,
    /// Parameter-space speed exceeded the blowup factor times its initial value.
    VelocityBlowup,
    /// The metric became numerically singular.
    SingularFim,
    /// A finite-difference probe left the parameter domain.
    DomainBoundary,
    MaxTau,
    StepFailure,
}

#[derive(Debug, Clone)]
pub struct GeodesicOptions {
    pub tau_max: f64,
    /// Run along the opposite of the selected initial direction.
    pub reverse: bool,
    /// Override of the initial direction, in working coordinates (`ln p` for
    /// log-scaled parameters).
    pub direction: Option<Vec<f64>>,
    pub log10_bound: f64,
    pub speed_blowup: f64,
    pub fim_condition_max: f64,
    pub rtol: f64,
    pub atol: f64,
    pub classify: ClassifyOptions,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        GeodesicOptions {
            tau_max: 10.0,
            reverse: false,
            direction: None,
            log10_bound: 6.0,
            speed_blowup: 1e6,
            fim_condition_max: FIM_CONDITION_MAX,
            rtol: 1e-8,
            atol: 1e-10,
            classify: ClassifyOptions::default(),
        }
    }
}

/// A sampled geodesic. `tau` is data-space arc length (the initial velocity
/// is scaled to unit data-space speed).
#[derive(Debug, Clone)]
pub struct GeodesicTrace {
    pub param_names: Vec<String>,
    pub taus: Vec<f64>,
    pub params: Vec<DVector<f64>>,
    /// Physical `dp/dτ`.
    pub velocities: Vec<DVector<f64>>,
    pub data_points: Vec<DVector<f64>>,
    /// Data-space speed `‖J dp/dτ‖` at each point.
    pub speeds: Vec<f64>,
    pub termination: Termination,
    pub classification: Option<LimitClassification>,
}

impl GeodesicTrace {
    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// CSV with header `tau, p_1..p_N, v_1..v_N, y_1..y_M`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let n = self.param_names.len();
        let m = self.data_points.first().map_or(0, |y| y.len());
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["tau".to_string()];
        header.extend((1..=n).map(|i| format!("p_{i}")));
        header.extend((1..=n).map(|i| format!("v_{i}")));
        header.extend((1..=m).map(|i| format!("y_{i}")));
        w.write_record(&header)?;
        for k in 0..self.len() {
            let mut row = vec![format!("{:e}", self.taus[k])];
            row.extend(self.params[k].iter().map(|x| format!("{x:e}")));
            row.extend(self.velocities[k].iter().map(|x| format!("{x:e}")));
            row.extend(self.data_points[k].iter().map(|x| format!("{x:e}")));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Termination and limit summary, e.g. `"rho2: ToZero"` lines.
    pub fn summary_json(&self) -> Value {
        let mut lines = Vec::new();
        let mut kinds = serde_json::Map::new();
        let mut invariants = Vec::new();
        if let Some(c) = &self.classification {
            for (name, kind) in self.param_names.iter().zip(&c.kinds) {
                lines.push(format!("{name}: {kind:?}"));
                kinds.insert(name.clone(), json!(format!("{kind:?}")));
            }
            for inv in &c.invariants {
                let label = format!("{}/{}", self.param_names[inv.i], self.param_names[inv.j]);
                lines.push(format!("{label} -> {}", inv.ratio));
                invariants.push(json!({
                    "ratio": label,
                    "value": inv.ratio,
                    "log_drift": inv.log_drift,
                }));
            }
        }
        json!({
            "termination": format!("{:?}", self.termination),
            "points": self.len(),
            "tau_end": self.taus.last().copied().unwrap_or(0.0),
            "param_names": self.param_names,
            "classification": kinds,
            "invariants": invariants,
            "summary": lines,
        })
    }
}

struct Recorder {
    taus: Vec<f64>,
    qs: Vec<Vec<f64>>,
    vs: Vec<Vec<f64>>,
    speeds: Vec<f64>,
    data: Vec<DVector<f64>>,
    stop: Option<Termination>,
}

/// Integrates the geodesic equation `q̈ = −Γ(q̇, q̇)` from `p0`.
///
/// Geometry runs in working coordinates (`ln pᵢ` for log-scaled parameters).
/// The trace stores physical parameters and velocities.
pub fn run_geodesic<M: ParamModel>(model: &M, p0: &[f64], opts: &GeodesicOptions) -> Result<GeodesicTrace> {
    let chart = Chart::new(model);
    let n = chart.n_params();
    if p0.len() != n {
        return Err(Error::invalid("p0", format!("expected {n} values, got {}", p0.len())));
    }
    if !(opts.tau_max >= 0.0) {
        return Err(Error::invalid("tau_max", "must be non-negative"));
    }
    let q0 = chart.to_chart(p0)?;
    let empty = |termination| GeodesicTrace {
        param_names: chart.param_names(),
        taus: Vec::new(),
        params: Vec::new(),
        velocities: Vec::new(),
        data_points: Vec::new(),
        speeds: Vec::new(),
        termination,
        classification: None,
    };
    if opts.tau_max == 0.0 {
        return Ok(empty(Termination::MaxTau));
    }

    let mut dir = match &opts.direction {
        Some(d) if d.len() == n => DVector::from_column_slice(d),
        Some(d) => return Err(Error::invalid("direction", format!("expected {n} values, got {}", d.len()))),
        None => initial_velocity(&chart, &q0)?.v,
    };
    if opts.reverse {
        dir.neg_mut();
    }
    let j0 = chart_jacobian(&chart, &q0)?;
    let data_speed = (&j0 * &dir).norm();
    if !(data_speed > 0.0) {
        return Err(Error::SingularFim { condition: f64::INFINITY });
    }
    let v0 = dir / data_speed;
    let v0_norm = v0.norm();

    let mut y0 = DVector::zeros(2 * n);
    y0.rows_mut(0, n).copy_from_slice(&q0);
    y0.rows_mut(n, n).copy_from(&v0);

    let rhs = |_t: f64, y: &DVector<f64>| -> Result<DVector<f64>> {
        let q: Vec<f64> = y.rows(0, n).iter().copied().collect();
        let v: Vec<f64> = y.rows(n, n).iter().copied().collect();
        let j = chart_jacobian(&chart, &q)?;
        let a = acceleration_from_jacobian(&chart, &q, &v, &j, opts.fim_condition_max)?;
        let mut dy = DVector::zeros(2 * n);
        dy.rows_mut(0, n).copy_from_slice(&v);
        dy.rows_mut(n, n).copy_from(&a);
        Ok(dy)
    };

    let mut rec = Recorder {
        taus: Vec::new(),
        qs: Vec::new(),
        vs: Vec::new(),
        speeds: Vec::new(),
        data: Vec::new(),
        stop: None,
    };
    let ln10 = std::f64::consts::LN_10;
    let log_flags = model.log_scaled();
    let observer = |t: f64, y: &DVector<f64>| -> Result<Control> {
        let q: Vec<f64> = y.rows(0, n).iter().copied().collect();
        let v: Vec<f64> = y.rows(n, n).iter().copied().collect();
        let p = chart.to_physical(&q);
        let data = chart.predict(&q)?;
        let j = chart_jacobian(&chart, &q);
        let speed = match &j {
            Ok(j) => (j * DVector::from_column_slice(&v)).norm(),
            Err(_) => f64::NAN,
        };
        rec.taus.push(t);
        rec.qs.push(q.clone());
        rec.vs.push(v.clone());
        rec.speeds.push(speed);
        rec.data.push(data);

        for i in 0..n {
            let decades = if log_flags[i] {
                (q[i] - q0[i]).abs() / ln10
            } else if p[i] != 0.0 && p0[i] != 0.0 {
                (p[i] / p0[i]).abs().log10().abs()
            } else {
                0.0
            };
            if decades > opts.log10_bound {
                rec.stop = Some(Termination::ParamDiverged);
                return Ok(Control::Stop);
            }
        }
        if DVector::from_column_slice(&v).norm() > opts.speed_blowup * v0_norm {
            rec.stop = Some(Termination::VelocityBlowup);
            return Ok(Control::Stop);
        }
        match j {
            Ok(j) if fim_condition(&j) <= opts.fim_condition_max => Ok(Control::Continue),
            Ok(_) => {
                rec.stop = Some(Termination::SingularFim);
                Ok(Control::Stop)
            }
            Err(Error::DomainViolation { .. }) => {
                rec.stop = Some(Termination::DomainBoundary);
                Ok(Control::Stop)
            }
            Err(e) => Err(e),
        }
    };

    let ode = OdeOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        ..OdeOptions::default()
    };
    let outcome = integrate(rhs, 0.0, y0, opts.tau_max, &ode, observer);
    let termination = match outcome {
        Ok(out) if out.stopped => rec.stop.unwrap_or(Termination::MaxTau),
        Ok(_) => Termination::MaxTau,
        Err(Error::SingularFim { .. }) => Termination::SingularFim,
        Err(Error::DomainViolation { .. }) => Termination::DomainBoundary,
        Err(Error::StepFailure { .. }) => Termination::StepFailure,
        Err(e) => return Err(e),
    };

    let mut trace = empty(termination);
    trace.taus = rec.taus;
    trace.params = rec.qs.iter().map(|q| DVector::from_vec(chart.to_physical(q))).collect();
    trace.velocities = rec
        .qs
        .iter()
        .zip(&rec.vs)
        .map(|(q, v)| DVector::from_vec(chart.velocity_to_physical(q, v)))
        .collect();
    trace.data_points = rec.data;
    trace.speeds = rec.speeds;
    trace.classification = classify_limit(&trace, &opts.classify).ok();
    Ok(trace)
}
