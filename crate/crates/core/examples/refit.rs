//! Full boundary approximation loop on the Michaelis–Menten model: follow
//! each geodesic to its limit, pick the matching one-parameter model, and
//! refit it to the data of the original model.
//!
//! ```bash
//! cargo run --example refit
//! ```

use lti_mbam::manifold::{mmr_model, mmr_reduced_model, MmrLimit, DEFAULT_TIMES};
use lti_mbam::mbam::{refit_reduced, run_geodesic, FitOptions, FitResult, GeodesicOptions, LimitKind, ParamModel};

pub fn run_example() -> lti_mbam::Result<Vec<(MmrLimit, FitResult)>> {
    let full = mmr_model(1.0, &DEFAULT_TIMES)?;
    let p0 = [1.0, 1.0];
    let target = full.predict(&p0)?;
    let mut out = Vec::new();
    for reverse in [false, true] {
        let opts = GeodesicOptions {
            reverse,
            ..GeodesicOptions::default()
        };
        let trace = run_geodesic(&full, &p0, &opts)?;
        let kinds = &trace.classification.as_ref().expect("classified trace").kinds;
        let (limit, init) = match kinds.as_slice() {
            [LimitKind::Finite, LimitKind::ToZero] => (MmrLimit::Saturated, p0[0]),
            [LimitKind::ToInfinity, LimitKind::ToInfinity] => (MmrLimit::Linear, p0[0] / p0[1]),
            other => {
                println!("reverse={reverse}: no reduced model for {other:?}");
                continue;
            }
        };
        let reduced = mmr_reduced_model(limit, full.x0(), full.times())?;
        let fit = refit_reduced(&reduced, &target, &[init], &FitOptions::default())?;
        println!(
            "{limit:?}: {} = {:.6}, residual {:.3e} after {} iterations",
            reduced.param_names()[0],
            fit.params[0],
            fit.residual_norm,
            fit.iterations
        );
        out.push((limit, fit));
    }
    Ok(out)
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
