//! Example models for manifold exploration and the data-space search along
//! the BT–BSPA family.

mod models;
mod nearest;
mod sample;

pub use models::{
    mmr_model, mmr_reduced_model, two_exp_model, two_state_freq_model, FrequencyDataMap, MmrLimit, MmrModel,
    MmrReducedModel, ResponseMode, TwoExpModel, TwoStateFreqModel, DEFAULT_FREQUENCIES, DEFAULT_TIMES,
};
pub use nearest::{nearest_on_family, Metric, NearestResult};
pub use sample::{sample_manifold, Axis, GridSpec, ManifoldSample};
