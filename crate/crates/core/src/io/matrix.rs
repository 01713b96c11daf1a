//! NCBI-style substitution matrix text.
//!
//! ```text
//! # comment
//!    A  C
//! A  1 -1
//! C -1  1
//! ```
//!
//! Rows may come in any order but every column symbol needs exactly one row.

use log::warn;

use super::InputError;
use crate::model::SubstitutionMatrix;

fn symbol(token: &str, line: usize) -> Result<u8, InputError> {
    match token.as_bytes() {
        [c] if c.is_ascii_graphic() => Ok(c.to_ascii_uppercase()),
        _ => Err(InputError::UnknownSymbol {
            line,
            symbol: token.to_string(),
        }),
    }
}

/// Parses matrix text. An asymmetric matrix is accepted with a warning.
pub fn parse_matrix(bytes: &[u8]) -> Result<SubstitutionMatrix, InputError> {
    let text = String::from_utf8_lossy(bytes);
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_line, header) = lines.next().ok_or(InputError::NoHeader)?;
    let mut columns: Vec<u8> = Vec::new();
    for token in header.split_whitespace() {
        let s = symbol(token, header_line)?;
        if columns.contains(&s) {
            return Err(InputError::UnknownSymbol {
                line: header_line,
                symbol: token.to_string(),
            });
        }
        columns.push(s);
    }
    let k = columns.len();

    let mut rows: Vec<Option<Vec<i32>>> = vec![None; k];
    for (line, content) in lines {
        let mut tokens = content.split_whitespace();
        let head = tokens.next().expect("line is not blank");
        let row_symbol = symbol(head, line)?;
        let unknown = || InputError::UnknownSymbol {
            line,
            symbol: head.to_string(),
        };
        let index = columns
            .iter()
            .position(|&c| c == row_symbol)
            .ok_or_else(unknown)?;
        if rows[index].is_some() {
            return Err(unknown());
        }
        let scores = tokens
            .map(|t| {
                t.parse::<i32>().map_err(|_| InputError::NonInteger {
                    line,
                    token: t.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if scores.len() != k {
            return Err(InputError::RaggedRow {
                line,
                expected: k,
                found: scores.len(),
            });
        }
        rows[index] = Some(scores);
    }

    let mut scores = Vec::with_capacity(k * k);
    for (row, &s) in rows.into_iter().zip(&columns) {
        scores.extend(row.ok_or(InputError::MissingRow(s as char))?);
    }
    let matrix = SubstitutionMatrix::new(columns, scores).expect("square by construction");
    if !matrix.is_symmetric() {
        warn!("substitution matrix is not symmetric; scores are read as score(target, query)");
    }
    Ok(matrix)
}
