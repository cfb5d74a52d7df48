//! Balanced-realization model reduction for continuous-time LTI systems
//! (balanced truncation, singular perturbation and the family between them)
//! together with manifold boundary approximation: Fisher-information
//! geodesics on the model manifold of a parameterized model.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod fmt;
pub mod linalg;
pub mod manifold;
pub mod mbam;
pub mod lti;
pub mod ode;
pub mod params;
pub mod random;
pub mod reduction;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use lti::{BalancedRealization, StateSpace};
