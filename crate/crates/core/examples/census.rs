//! Parameter counts of the four LTI parameterizations for a few shapes.
//!
//! ```bash
//! cargo run --example census
//! ```

use lti_mbam::params::{param_census, CensusKind, ParamCensus};

pub fn run_example() -> lti_mbam::Result<Vec<(CensusKind, ParamCensus)>> {
    let (n, m, p) = (4, 2, 3);
    let mut out = Vec::new();
    println!("order {n}, {m} inputs, {p} outputs");
    for kind in [
        CensusKind::TransferFunction,
        CensusKind::TransferFunctionRank1,
        CensusKind::StateSpace,
        CensusKind::BalancedStateSpace,
    ] {
        let c = param_census(kind, n, m, p)?;
        println!(
            "{kind:>24}: total {:>3} (identifiable {}, structural {}, conditional {})",
            c.total, c.identifiable, c.structural, c.conditionally_identifiable
        );
        out.push((kind, c));
    }
    Ok(out)
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
