//! Acoustic measurements and predictors.

mod bands;
mod cost;
mod decay;
mod modes;
mod ned;

pub use bands::{band_filter, octave_band_t60, sabine_band_t60, BandT60, Biquad, OCTAVE_CENTERS};
pub use cost::{
    flops_estimate, memory_bound, overlap_add_fft_size, CostModel, FEET_TO_METERS, DEFAULT_FRAME_RATE,
};
pub use decay::{
    decay_analysis, eyring_t60, iso_min_distance, sabine_t60, sabine_t60_from, schroeder_edc, t60_from_edc,
    DecayAnalysis, EDC_FLOOR_DB, FIT_HI_DB, FIT_LO_DB,
};
pub use modes::{
    cubic_edge_threshold, cubic_mode_density, min_mode_density, mode_density, mode_density_check, ModeDensity,
    MODE_DENSITY_FACTOR,
};
pub use ned::{gaussian_expectation, ned_profile, ned_profile_with, NedCurve, NED_HOP_S, NED_WINDOW_S};
