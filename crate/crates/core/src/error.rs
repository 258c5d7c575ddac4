use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("record `{0}` has an empty sequence body")]
    EmptyRecord(String),
    #[error("record `{id}`: residue `{residue}` is not in the alphabet")]
    InvalidResidue { id: String, residue: char },
    #[error("duplicate sequence id `{0}`")]
    DuplicateId(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("empty sequence")]
    EmptySequence,
    #[error("alignment rows have unequal widths ({expected} vs {found})")]
    Ragged { expected: usize, found: usize },
    #[error("invalid alignment: {0}")]
    InvalidAlignment(String),
    #[error("invalid substitution matrix: {0}")]
    Matrix(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("column consists only of gaps")]
    AllGapColumn,
    #[error("length mismatch ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("sequence of length {len} is shorter than k = {k}")]
    TooShort { len: usize, k: usize },
    #[error("DP table needs {cells} cells, budget is {limit}")]
    MemoryBudget { cells: u128, limit: u128 },
    #[error("enumeration bound exceeded: {0}")]
    EnumerationBound(String),
    #[error("numerical underflow: {0}")]
    Underflow(String),
    #[error("source sequences differ: {0}")]
    SourceMismatch(String),
    #[error("trees are over different leaf sets")]
    LeafSetMismatch,
    #[error("missing posterior matrix for pair ({0}, {1})")]
    MissingPair(usize, usize),
    #[error("libraries cover different sequence sets")]
    UniverseMismatch,
    #[error("no admissible alignment path")]
    Unreachable,
}
