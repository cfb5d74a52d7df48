//! Parameter limits of a two-state balanced system. Sending the second HSV or
//! its input/output size to zero recovers truncation; growing the size
//! recovers singular perturbation. Distances are band-limited H-infinity norms.
//!
//! ```bash
//! cargo run --example theorem_limits
//! ```

use lti_mbam::lti::hinf_norm_band;
use lti_mbam::params::{realize, BalancedParams};
use lti_mbam::reduction::{balanced_truncate, bspa};
use lti_mbam::StateSpace;

const BAND: (f64, f64) = (1e-4, 1e2);

fn two_state(theta2: f64, r2: f64) -> lti_mbam::Result<StateSpace> {
    let p = BalancedParams::siso(&[1.0, theta2], &[1.0, r2], 0.0)?;
    Ok(realize(&p)?.balanced.sys().clone())
}

fn band_distance(a: &StateSpace, b: &StateSpace) -> lti_mbam::Result<f64> {
    Ok(hinf_norm_band(&a.difference(b)?, BAND.0, BAND.1)?.norm)
}

/// `(label, distances)` for each limit.
pub fn run_example() -> lti_mbam::Result<Vec<(&'static str, Vec<f64>)>> {
    let nominal = realize(&BalancedParams::siso(&[1.0, 0.7], &[1.0, 8.0], 0.0)?)?.balanced;
    let bt = balanced_truncate(&nominal, 1)?.reduced;
    let sp = bspa(&nominal, 1)?.reduced;

    let mut out = Vec::new();
    let eps = [1e-2, 1e-4, 1e-6];
    let d: Vec<f64> = eps
        .iter()
        .map(|&e| band_distance(&two_state(e, 8.0)?, &bt))
        .collect::<lti_mbam::Result<_>>()?;
    out.push(("theta2 -> 0, distance to BT", d));
    let d: Vec<f64> = eps
        .iter()
        .map(|&e| band_distance(&two_state(0.7, e)?, &bt))
        .collect::<lti_mbam::Result<_>>()?;
    out.push(("r2 -> 0, distance to BT", d));
    let d: Vec<f64> = [10.0, 1e2, 1e3]
        .iter()
        .map(|&r| band_distance(&two_state(0.7, r)?, &sp))
        .collect::<lti_mbam::Result<_>>()?;
    out.push(("r2 -> inf, distance to BSPA", d));

    for (label, d) in &out {
        let shown: Vec<String> = d.iter().map(|x| format!("{x:.3e}")).collect();
        println!("{label}: {}", shown.join(", "));
    }
    Ok(out)
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
