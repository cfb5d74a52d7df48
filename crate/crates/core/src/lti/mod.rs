//! Linear time-invariant systems: state-space form, transfer-function
//! evaluation, Lyapunov equations, Gramians, balancing and H∞ norms.

mod balance;
mod hinf;
pub mod io;
mod lyapunov;
mod state_space;

pub use balance::{balance, balance_with, hankel_singular_values, BalancedRealization};
pub use hinf::{hinf_norm, hinf_norm_band, hinf_norm_with, PeakGain};
pub use lyapunov::{gramians, is_hurwitz, is_stable, solve_lyapunov, solve_lyapunov_with, Gramians};
pub use state_space::{FrequencyResponse, StateSpace};
