//! FASTA records.
//!
//! A record starts at a `>` line; its id is the first whitespace-separated
//! word of that line. Residue lines are concatenated with all whitespace
//! removed and folded to upper case. Callers align only the first record of
//! each file.

use super::InputError;
use crate::model::{Alphabet, Sequence};

/// Parses every record in `bytes`, checking residues against `alphabet`.
pub fn parse_fasta(bytes: &[u8], alphabet: &Alphabet) -> Result<Vec<Sequence>, InputError> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(InputError::EmptyFile);
    }
    if !bytes
        .split(|&c| c == b'\n')
        .any(|line| line.starts_with(b">"))
    {
        return Err(InputError::NoRecords);
    }
    let mut records: Vec<(String, Vec<u8>)> = Vec::new();
    for (index, line) in bytes.split(|&c| c == b'\n').enumerate() {
        if let Some(header) = line.strip_prefix(b">") {
            let header = String::from_utf8_lossy(header);
            let id = header.split_whitespace().next().unwrap_or("").to_string();
            records.push((id, Vec::new()));
            continue;
        }
        let residues = line.iter().filter(|c| !c.is_ascii_whitespace());
        match records.last_mut() {
            Some((_, seq)) => seq.extend(residues.map(u8::to_ascii_uppercase)),
            None if residues.clone().next().is_some() => {
                return Err(InputError::ResiduesBeforeHeader { line: index + 1 })
            }
            None => {}
        }
    }
    records
        .into_iter()
        .map(|(id, residues)| {
            if let Some(offset) = residues.iter().position(|&r| !alphabet.contains(r)) {
                return Err(InputError::IllegalResidue {
                    residue: residues[offset] as char,
                    record: id,
                    offset,
                });
            }
            Ok(Sequence::new(id, &residues, alphabet).expect("residues checked above"))
        })
        .collect()
}

/// Renders records with residue lines wrapped at `width` (at least 1).
pub fn write_fasta(records: &[Sequence], width: usize) -> String {
    let width = width.max(1);
    let mut out = String::new();
    for seq in records {
        out.push('>');
        out.push_str(&seq.id);
        out.push('\n');
        for chunk in seq.residues().chunks(width) {
            out.push_str(&String::from_utf8_lossy(chunk));
            out.push('\n');
        }
    }
    out
}
