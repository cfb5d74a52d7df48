//! Reduce a random 6-state system by two states with balanced truncation,
//! singular perturbation and a point in between, and compare each achieved
//! H-infinity error with the a priori bound.
//!
//! ```bash
//! cargo run --example reduce
//! ```

use lti_mbam::lti::balance;
use lti_mbam::random::{random_minimal_system, seeded};
use lti_mbam::reduction::{verify_bounds, Method};

pub fn run_example() -> lti_mbam::Result<()> {
    let sys = random_minimal_system(&mut seeded(11), 6, 1, 1)?;
    let bal = balance(&sys)?;
    let hsv = bal.hsv();
    println!("hsv = {:?}", hsv.as_slice());
    let half = [0.5 * hsv[4], 0.5 * hsv[5]];
    for (method, eta) in [(Method::Bt, &[][..]), (Method::Bspa, &[][..]), (Method::Interp, &half[..])] {
        let check = verify_bounds(&sys, 2, method, eta)?;
        println!(
            "{method:?}: error {:.6e} <= bound {:.6e}: {}",
            check.actual_error, check.bound, check.satisfied
        );
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
