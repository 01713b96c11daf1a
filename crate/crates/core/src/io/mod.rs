//! Reading sequences and substitution matrices, and rendering results.

pub mod fasta;
pub mod matrix;
pub mod output;

use thiserror::Error;

pub use fasta::{parse_fasta, write_fasta};
pub use matrix::parse_matrix;
pub use output::{write_output, OutputFormat};

/// Problems with user-supplied input files.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("input is empty")]
    EmptyFile,
    #[error("no FASTA records found")]
    NoRecords,
    #[error("line {line}: residues appear before the first '>' header")]
    ResiduesBeforeHeader { line: usize },
    #[error("record {record:?}: illegal residue {residue:?} at offset {offset}")]
    IllegalResidue {
        record: String,
        residue: char,
        offset: usize,
    },
    #[error("line {line}: expected {expected} scores, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: unknown or repeated matrix symbol {symbol:?}")]
    UnknownSymbol { line: usize, symbol: String },
    #[error("line {line}: {token:?} is not an integer")]
    NonInteger { line: usize, token: String },
    #[error("matrix has no column header")]
    NoHeader,
    #[error("matrix has no row for {0:?}")]
    MissingRow(char),
}
