//! Realize a two-state balanced system from its parameters, then balance a
//! random system and check that the gramians come out equal and diagonal.
//!
//! ```bash
//! cargo run --example balance
//! ```

use lti_mbam::lti::{balance, gramians};
use lti_mbam::params::{check_lemma1, extract_params, realize, BalancedParams};
use lti_mbam::random::{random_minimal_system, seeded};

pub fn run_example() -> lti_mbam::Result<()> {
    let params = BalancedParams::siso(&[1.0, 0.7], &[1.0, 8.0], 0.0)?;
    let realized = realize(&params)?;
    let sys = realized.balanced.sys();
    println!("A = {:?}", sys.a().as_slice());
    println!("B = {:?}", sys.b().as_slice());
    println!("C = {:?}", sys.c().as_slice());

    let mut rng = seeded(7);
    let random = random_minimal_system(&mut rng, 5, 2, 2)?;
    let bal = balance(&random)?;
    let g = gramians(bal.sys())?;
    let off = (&g.controllability - &g.observability).abs().max();
    println!("hsv = {:?}", bal.hsv().as_slice());
    println!("max |P - Q| after balancing = {off:.2e}");
    println!("Lemma-1 deviation = {:.2e}", check_lemma1(bal.sys()));

    let back = extract_params(&bal)?;
    println!("theta recovered = {:?}", back.theta().as_slice());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
