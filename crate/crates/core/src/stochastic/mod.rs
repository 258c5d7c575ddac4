//! Genetic-algorithm search over multiple alignments and simulated
//! annealing over pairwise alignments.

mod contact;
mod ga;
mod sa;

pub use contact::{parse_contacts, CaoTable, ContactScorer, ContactTerm};
pub use ga::{
    crossover_points, ga_crossover, ga_init, ga_mutate, ga_run, ga_select, random_alignment, shift_residue, GaParams,
    GaResult, GenerationStats, Individual, Objective,
};
pub use sa::{
    available_moves, metropolis_accept, sa_energy, sa_perturb, sa_run, BlockStats, Move, SaParams, SaResult, SaStop,
};
