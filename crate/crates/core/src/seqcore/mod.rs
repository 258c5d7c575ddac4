//! Sequence and alignment data model, substitution matrices, gap models and
//! the FASTA / clustal-like text formats.

mod alignment;
mod alphabet;
mod io;
mod matrix;

pub use alignment::{degap, strip_gap_columns, Alignment, Sequence};
pub use alphabet::{Alphabet, GAP, UNKNOWN};
pub use io::{emit_alignment, parse_aligned_fasta, parse_alignment, parse_clustal, parse_fasta, Format};
pub use matrix::{GapModel, SubstitutionMatrix, TerminalGaps};
