//! Concentration statistics and cut distances.

pub mod cut;
mod stats;

pub use cut::{cut_distance_const, restricted_cut_distance, spectral_upper, split_upper, CutDistance, CutMode, N_EXACT_CUT};
pub use stats::*;
