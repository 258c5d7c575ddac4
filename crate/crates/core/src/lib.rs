//! Multiple sequence alignment toolkit.
//!
//! The crate is organised by strategy:
//!
//! * [`seqcore`] sequences, alignments, substitution matrices and file formats
//! * [`objective`] column, pairwise, sum-of-pairs, identity and Q scores
//! * [`exactdp`] pairwise global/local DP, three-way DP and enumeration oracles
//! * [`guidetree`] k-mer and identity distances, UPGMA, neighbor joining, tree comparison
//! * [`consistlib`] residue-pair constraint libraries and triplet extension
//! * [`pairhmm`] pair-HMM posteriors, maximum expected accuracy, consistency transform
//! * [`progressive`] profiles, profile-profile alignment and the progressive pipelines
//! * [`refine`] tree-dependent and random bipartition refinement
//! * [`stochastic`] genetic algorithm and simulated annealing searches

pub mod consistlib;
mod dp;
pub mod error;
pub mod exactdp;
pub mod guidetree;
pub mod objective;
pub mod pairhmm;
pub mod progressive;
pub mod refine;
pub mod seqcore;
pub mod stochastic;

pub use error::{Error, Result};
pub use seqcore::{Alignment, Alphabet, GapModel, Sequence, SubstitutionMatrix, TerminalGaps};
