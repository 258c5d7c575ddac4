//! Profiles, profile-profile alignment and the progressive pipelines.

mod align;
mod config;
mod pipelines;
mod profile;

pub use align::{
    profile_align, progressive_align, progressive_align_cached, sequence_weights, Aligner, Group, SequenceWeighting,
    SubtreeCache,
};
pub use config::{Exact3Config, MuscleConfig, PipelineConfig, ProbconsConfig, Strategy, TcoffeeConfig};
pub use pipelines::{
    global_identity_distances, kimura_matrix, muscle_pipeline, posterior_objective, probcons_pipeline,
    probcons_posteriors, tcoffee_library, tcoffee_pipeline, PipelineOutput,
};
pub use profile::{build_profile, psp_score, ColumnPairScorer, LibraryScorer, PosteriorScorer, Profile, PspScorer};
