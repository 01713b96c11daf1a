use thiserror::Error;

use crate::model::Coord;

/// Errors raised by the alignment library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlignError {
    #[error("maximum substitution score must be positive, got {0}")]
    NonPositiveMaxScore(i32),
    #[error("substitution score undefined for pair ({0}, {1})")]
    IncompleteMatrix(char, char),
    #[error("invalid scoring parameter: {0}")]
    InvalidParameter(String),
    #[error("illegal residue {residue:?} at offset {offset}")]
    IllegalResidue { residue: char, offset: usize },
    #[error("path inconsistent with residues at op {op_index}: {reason}")]
    PathInconsistent { op_index: usize, reason: String },
    #[error("malformed CIGAR string: {0}")]
    BadCigar(String),
    #[error("score mismatch: expected {expected}, found {found} ({context})")]
    ScoreMismatch {
        expected: i32,
        found: i32,
        context: &'static str,
    },
    #[error("no start cell attains score {score} for end {end}")]
    StartNotFound { score: i32, end: Coord },
    #[error("path parts are not contiguous: part ends at {left}, next starts at {right}")]
    DiscontiguousParts { left: Coord, right: Coord },
    #[error("unsupported split count {0} (only 1 or 2)")]
    UnsupportedSplit(usize),
    #[error("oracle refused {cells} cells (budget {budget})")]
    OracleBudget { cells: u128, budget: u128 },
    #[error("worker panicked: {0}")]
    WorkerPanic(String),
}

pub type Result<T, E = AlignError> = std::result::Result<T, E>;
