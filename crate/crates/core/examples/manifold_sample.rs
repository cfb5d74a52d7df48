//! Sample the two-state model manifold over a `(θ₂, r₂)` grid and dump the
//! data points as CSV.
//!
//! ```bash
//! cargo run --example manifold_sample > manifold.csv
//! ```

use lti_mbam::manifold::{
    sample_manifold, Axis, FrequencyDataMap, GridSpec, ManifoldSample, ResponseMode, TwoStateFreqModel,
    DEFAULT_FREQUENCIES,
};

pub fn run_example() -> lti_mbam::Result<ManifoldSample> {
    let map = FrequencyDataMap::new(&DEFAULT_FREQUENCIES, ResponseMode::Magnitude)?;
    let model = TwoStateFreqModel::siso(1.0, 1.0, 0.0, map)?;
    let grid = GridSpec {
        axes: vec![Axis::log(1e-3, 0.99, 25), Axis::log(1e-2, 1e2, 25)],
    };
    let sample = sample_manifold(&model, &grid)?;
    eprintln!("{} points, {} gaps", sample.len(), sample.gaps());
    Ok(sample)
}

fn main() {
    match run_example() {
        Ok(sample) => {
            if let Err(e) = sample.write_csv(std::io::stdout().lock()) {
                eprintln!("error: {e}");
                std::process::exit(1);
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
