//! Follow both geodesics out of `(ρ₁, ρ₂) = (1, 1)` on the Michaelis–Menten
//! model manifold and report which parameter limit each one reaches.
//!
//! ```bash
//! cargo run --example geodesic_mmr
//! ```

use lti_mbam::manifold::{mmr_model, DEFAULT_TIMES};
use lti_mbam::mbam::{run_geodesic, GeodesicOptions, GeodesicTrace};

pub fn run_example() -> lti_mbam::Result<Vec<GeodesicTrace>> {
    let model = mmr_model(1.0, &DEFAULT_TIMES)?;
    let mut traces = Vec::new();
    for reverse in [false, true] {
        let opts = GeodesicOptions {
            reverse,
            ..GeodesicOptions::default()
        };
        let trace = run_geodesic(&model, &[1.0, 1.0], &opts)?;
        let last = trace.params.last().expect("non-empty trace");
        println!(
            "reverse={reverse}: {} points, tau_end={:.4}, termination={:?}, p_end=({:.3e}, {:.3e})",
            trace.len(),
            trace.taus.last().unwrap(),
            trace.termination,
            last[0],
            last[1]
        );
        for line in trace.summary_json()["summary"].as_array().unwrap() {
            println!("  {}", line.as_str().unwrap());
        }
        traces.push(trace);
    }
    Ok(traces)
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
