//! Pair-HMM posteriors, maximum-expected-accuracy decoding and the
//! probabilistic consistency transformation.

mod model;
mod posterior;

pub use model::{forward_backward, forward_backward_tables, ForwardBackward, HmmConfig, PairHmmParams};
pub use posterior::{
    compute_posteriors, consistency_transform, expected_accuracy_table, mea_align, mea_alignment, MeaResult,
    PosteriorMatrix, PosteriorSet,
};

/// Default threshold below which posterior entries are dropped.
pub const DEFAULT_EPSILON: f64 = 0.01;

/// Builds model parameters from a substitution matrix and two gap probabilities.
pub fn default_params(
    m: &crate::SubstitutionMatrix,
    gap_open: f64,
    gap_extend: f64,
) -> crate::Result<PairHmmParams> {
    PairHmmParams::new(
        m,
        &HmmConfig {
            gap_open,
            gap_extend,
            ..HmmConfig::default()
        },
    )
}
