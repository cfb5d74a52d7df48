//! Compare BT and BSPA in data space for two choices of the weak state, then
//! search the interpolating family for the closest reduced model.
//!
//! ```bash
//! cargo run --example nearest_family
//! ```

use lti_mbam::manifold::{nearest_on_family, FrequencyDataMap, Metric, NearestResult, ResponseMode, DEFAULT_FREQUENCIES};
use lti_mbam::params::{realize, BalancedParams};

pub fn run_example() -> lti_mbam::Result<Vec<((f64, f64), NearestResult)>> {
    let map = FrequencyDataMap::new(&DEFAULT_FREQUENCIES, ResponseMode::Magnitude)?;
    let mut out = Vec::new();
    for (theta2, r2) in [(0.7, 8.0), (0.01, 0.8)] {
        let bal = realize(&BalancedParams::siso(&[1.0, theta2], &[1.0, r2], 0.0)?)?.balanced;
        let target = map.map(bal.sys())?;
        let r = nearest_on_family(&target, &bal, 1, &map, Metric::Euclidean)?;
        let closer = if r.bspa_distance < r.bt_distance { "BSPA" } else { "BT" };
        println!(
            "theta2={theta2}, r2={r2}: BT {:.6e}, BSPA {:.6e} ({closer} closer), eta*={:.6e} at {:.6e}",
            r.bt_distance, r.bspa_distance, r.eta_star[0], r.distance
        );
        out.push(((theta2, r2), r));
    }
    Ok(out)
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
