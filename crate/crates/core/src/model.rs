//! Alphabets, sequences, scoring schemes and alignment paths.
//!
//! Residues are stored upper-cased as raw bytes in [`Sequence`]; every
//! algorithm in the crate works on *encoded* residues, i.e. indices into the
//! scheme's [`Alphabet`], obtained with [`ScoringScheme::encode`].
//!
//! Gap convention: a gap of length `k` costs `gap_open + k * gap_extend`.

use std::fmt;

use crate::error::{AlignError, Result};

/// Scores are small integers; anything at or below this is treated as "minus infinity".
pub const NEG_INF: i32 = i32::MIN / 2;

/// Largest magnitude accepted for any scoring parameter. Keeps every DP
/// addition far away from `i32` overflow even for megabase inputs.
pub const MAX_PARAM: i32 = 1 << 16;

const NO_CODE: u8 = u8::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphabetKind {
    Nucleotide,
    Protein,
}

/// Ordered residue set with an upper-case folding rule.
#[derive(Clone)]
pub struct Alphabet {
    kind: AlphabetKind,
    symbols: Vec<u8>,
    index: [u8; 256],
    wildcard: Option<u8>,
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Alphabet")
            .field("kind", &self.kind)
            .field("symbols", &String::from_utf8_lossy(&self.symbols))
            .field("wildcard", &self.wildcard.map(char::from))
            .finish()
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.symbols == other.symbols && self.wildcard == other.wildcard
    }
}

impl Eq for Alphabet {}

pub const DNA_SYMBOLS: &[u8] = b"ACGT";
pub const PROTEIN_SYMBOLS: &[u8] = b"ARNDCQEGHILKMFPSTWYV";

impl Alphabet {
    /// `ACGT`, plus `N` as a wildcard when `wildcard` is set.
    pub fn dna(wildcard: bool) -> Self {
        let mut symbols = DNA_SYMBOLS.to_vec();
        if wildcard {
            symbols.push(b'N');
        }
        let mut alphabet =
            Self::custom(AlphabetKind::Nucleotide, &symbols).expect("static alphabet");
        alphabet.wildcard = wildcard.then_some(b'N');
        alphabet
    }

    pub fn protein() -> Self {
        Self::custom(AlphabetKind::Protein, PROTEIN_SYMBOLS).expect("static alphabet")
    }

    /// Builds an alphabet from an explicit symbol list (upper-cased).
    pub fn custom(kind: AlphabetKind, symbols: &[u8]) -> Result<Self> {
        if symbols.is_empty() || symbols.len() >= NO_CODE as usize {
            return Err(AlignError::InvalidParameter(format!(
                "alphabet must have between 1 and {} symbols",
                NO_CODE - 1
            )));
        }
        let mut index = [NO_CODE; 256];
        let mut folded = Vec::with_capacity(symbols.len());
        for (code, &s) in symbols.iter().enumerate() {
            let s = s.to_ascii_uppercase();
            if !s.is_ascii_graphic() || index[s as usize] != NO_CODE {
                return Err(AlignError::InvalidParameter(format!(
                    "duplicate or unprintable alphabet symbol {:?}",
                    s as char
                )));
            }
            index[s as usize] = code as u8;
            index[s.to_ascii_lowercase() as usize] = code as u8;
            folded.push(s);
        }
        Ok(Self {
            kind,
            symbols: folded,
            index,
            wildcard: None,
        })
    }

    pub fn kind(&self) -> AlphabetKind {
        self.kind
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn wildcard(&self) -> Option<u8> {
        self.wildcard
    }

    pub fn contains(&self, residue: u8) -> bool {
        self.index[residue as usize] != NO_CODE
    }

    pub fn code(&self, residue: u8) -> Option<u8> {
        match self.index[residue as usize] {
            NO_CODE => None,
            c => Some(c),
        }
    }

    pub fn symbol(&self, code: u8) -> u8 {
        self.symbols[code as usize]
    }

    /// Encodes residues into alphabet codes, rejecting unknown residues.
    pub fn encode(&self, residues: &[u8]) -> Result<Vec<u8>> {
        residues
            .iter()
            .enumerate()
            .map(|(offset, &r)| {
                self.code(r).ok_or(AlignError::IllegalResidue {
                    residue: r as char,
                    offset,
                })
            })
            .collect()
    }
}

/// A named residue string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    pub id: String,
    residues: Vec<u8>,
}

impl Sequence {
    /// Upper-cases `residues` and checks every one against `alphabet`.
    pub fn new(id: impl Into<String>, residues: &[u8], alphabet: &Alphabet) -> Result<Self> {
        let residues: Vec<u8> = residues.iter().map(u8::to_ascii_uppercase).collect();
        if let Some(offset) = residues.iter().position(|&r| !alphabet.contains(r)) {
            return Err(AlignError::IllegalResidue {
                residue: residues[offset] as char,
                offset,
            });
        }
        Ok(Self {
            id: id.into(),
            residues,
        })
    }

    pub fn residues(&self) -> &[u8] {
        &self.residues
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }
}

/// A square substitution table keyed by symbol, as read from a matrix file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubstitutionMatrix {
    symbols: Vec<u8>,
    scores: Vec<i32>,
}

impl SubstitutionMatrix {
    /// `scores` is row-major over `symbols`.
    pub fn new(symbols: Vec<u8>, scores: Vec<i32>) -> Result<Self> {
        if scores.len() != symbols.len() * symbols.len() {
            return Err(AlignError::InvalidParameter(format!(
                "matrix over {} symbols needs {} scores, got {}",
                symbols.len(),
                symbols.len() * symbols.len(),
                scores.len()
            )));
        }
        Ok(Self { symbols, scores })
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn get(&self, a: u8, b: u8) -> Option<i32> {
        let k = self.symbols.len();
        let ia = self
            .symbols
            .iter()
            .position(|&s| s == a.to_ascii_uppercase())?;
        let ib = self
            .symbols
            .iter()
            .position(|&s| s == b.to_ascii_uppercase())?;
        Some(self.scores[ia * k + ib])
    }

    pub fn is_symmetric(&self) -> bool {
        let k = self.symbols.len();
        (0..k).all(|a| (0..a).all(|b| self.scores[a * k + b] == self.scores[b * k + a]))
    }
}

/// Where substitution scores come from, before validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Substitution {
    /// Fixed match / mismatch scores. The alphabet wildcard, if any, scores 0
    /// against everything.
    MatchMismatch {
        match_score: i32,
        mismatch: i32,
    },
    Matrix(SubstitutionMatrix),
}

/// A validated substitution table plus affine gap penalties.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoringScheme {
    alphabet: Alphabet,
    // Column-major: by_col[b * k + a] = score(a, b).
    by_col: Vec<i32>,
    max_substitution: i32,
    pub gap_open: i32,
    pub gap_extend: i32,
}

/// Checks a scheme against an alphabet and materializes its score table.
pub fn validate_scheme(
    substitution: &Substitution,
    alphabet: &Alphabet,
    gap_open: i32,
    gap_extend: i32,
) -> Result<ScoringScheme> {
    if !(0..=MAX_PARAM).contains(&gap_open) {
        return Err(AlignError::InvalidParameter(format!(
            "gap open {gap_open} outside 0..={MAX_PARAM}"
        )));
    }
    if !(1..=MAX_PARAM).contains(&gap_extend) {
        return Err(AlignError::InvalidParameter(format!(
            "gap extend {gap_extend} outside 1..={MAX_PARAM}"
        )));
    }
    let k = alphabet.len();
    let mut by_col = vec![0; k * k];
    for (ia, &a) in alphabet.symbols().iter().enumerate() {
        for (ib, &b) in alphabet.symbols().iter().enumerate() {
            let score = match substitution {
                Substitution::MatchMismatch { .. }
                    if alphabet.wildcard().is_some_and(|w| w == a || w == b) =>
                {
                    0
                }
                Substitution::MatchMismatch {
                    match_score,
                    mismatch,
                } => {
                    if a == b {
                        *match_score
                    } else {
                        *mismatch
                    }
                }
                Substitution::Matrix(m) => m
                    .get(a, b)
                    .ok_or(AlignError::IncompleteMatrix(a as char, b as char))?,
            };
            if score.abs() > MAX_PARAM {
                return Err(AlignError::InvalidParameter(format!(
                    "substitution score {score} exceeds {MAX_PARAM}"
                )));
            }
            by_col[ib * k + ia] = score;
        }
    }
    let max_substitution = by_col.iter().copied().max().unwrap_or(0);
    if max_substitution <= 0 {
        return Err(AlignError::NonPositiveMaxScore(max_substitution));
    }
    Ok(ScoringScheme {
        alphabet: alphabet.clone(),
        by_col,
        max_substitution,
        gap_open,
        gap_extend,
    })
}

impl ScoringScheme {
    /// Shorthand for a validated match/mismatch scheme.
    pub fn match_mismatch(
        alphabet: &Alphabet,
        match_score: i32,
        mismatch: i32,
        gap_open: i32,
        gap_extend: i32,
    ) -> Result<Self> {
        validate_scheme(
            &Substitution::MatchMismatch {
                match_score,
                mismatch,
            },
            alphabet,
            gap_open,
            gap_extend,
        )
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// The highest score any residue pair can earn.
    pub fn max_substitution(&self) -> i32 {
        self.max_substitution
    }

    /// Cost of the first residue of a gap.
    #[inline]
    pub fn open_extend(&self) -> i32 {
        self.gap_open + self.gap_extend
    }

    /// Total cost of a gap of `len` residues.
    pub fn gap_cost(&self, len: usize) -> i64 {
        if len == 0 {
            0
        } else {
            self.gap_open as i64 + len as i64 * self.gap_extend as i64
        }
    }

    /// Score of encoded residues `a` against `b`.
    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> i32 {
        self.by_col[b as usize * self.alphabet.len() + a as usize]
    }

    /// The whole table, column-major, with its side length.
    pub(crate) fn table(&self) -> (&[i32], usize) {
        (&self.by_col, self.alphabet.len())
    }

    /// Scores of every code against `b`, indexed by the other code.
    #[inline]
    pub fn column(&self, b: u8) -> &[i32] {
        let k = self.alphabet.len();
        &self.by_col[b as usize * k..(b as usize + 1) * k]
    }

    pub fn encode(&self, seq: &Sequence) -> Result<Vec<u8>> {
        self.alphabet.encode(seq.residues())
    }
}

/// A matrix coordinate: `i` indexes the first sequence, `j` the second.
/// Alignment regions are half-open, so `(i, j)` is the cell boundary after
/// consuming `i` and `j` residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Coord {
    pub i: usize,
    pub j: usize,
}

impl Coord {
    pub const fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// Score plus the region `[start, end)` of a local alignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlignmentSummary {
    pub score: i32,
    pub start: Coord,
    pub end: Coord,
}

impl AlignmentSummary {
    /// The "nothing aligns" result.
    pub const EMPTY: Self = Self {
        score: 0,
        start: Coord::new(0, 0),
        end: Coord::new(0, 0),
    };
}

/// One alignment column. `Insert` consumes the second sequence, `Delete` the first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Match,
    Mismatch,
    Insert,
    Delete,
}

impl Op {
    pub fn symbol(self) -> char {
        match self {
            Op::Match => '=',
            Op::Mismatch => 'X',
            Op::Insert => 'I',
            Op::Delete => 'D',
        }
    }

    fn from_symbol(c: char) -> Option<Self> {
        match c {
            '=' => Some(Op::Match),
            'X' => Some(Op::Mismatch),
            'I' => Some(Op::Insert),
            'D' => Some(Op::Delete),
            _ => None,
        }
    }

    /// Residues consumed from (first, second) sequence.
    pub fn step(self) -> (usize, usize) {
        match self {
            Op::Match | Op::Mismatch => (1, 1),
            Op::Insert => (0, 1),
            Op::Delete => (1, 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AlignmentPath {
    pub start: Coord,
    pub ops: Vec<Op>,
}

impl AlignmentPath {
    pub fn new(start: Coord, ops: Vec<Op>) -> Self {
        Self { start, ops }
    }

    pub fn empty(at: Coord) -> Self {
        Self {
            start: at,
            ops: Vec::new(),
        }
    }

    /// Coordinate reached after replaying every op.
    pub fn end(&self) -> Coord {
        self.ops.iter().fold(self.start, |c, op| {
            let (di, dj) = op.step();
            Coord::new(c.i + di, c.j + dj)
        })
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// Label for a diagonal column over encoded residues.
#[inline]
pub(crate) fn diagonal_op(a: u8, b: u8) -> Op {
    if a == b {
        Op::Match
    } else {
        Op::Mismatch
    }
}

/// Re-scores `path` over encoded sequences. Maximal runs of `Insert` or
/// `Delete` are charged as single affine gaps.
pub fn score_of_path(
    path: &AlignmentPath,
    seq1: &[u8],
    seq2: &[u8],
    scheme: &ScoringScheme,
) -> Result<i32> {
    let mut score: i64 = 0;
    let (mut i, mut j) = (path.start.i, path.start.j);
    let mut prev: Option<Op> = None;
    for (op_index, &op) in path.ops.iter().enumerate() {
        let inconsistent = |reason: String| AlignError::PathInconsistent { op_index, reason };
        match op {
            Op::Match | Op::Mismatch => {
                let (Some(&a), Some(&b)) = (seq1.get(i), seq2.get(j)) else {
                    return Err(inconsistent(format!(
                        "diagonal step past sequence end at ({i}, {j})"
                    )));
                };
                if diagonal_op(a, b) != op {
                    return Err(inconsistent(format!(
                        "{op:?} label disagrees with residues at ({i}, {j})"
                    )));
                }
                score += scheme.sub(a, b) as i64;
            }
            Op::Insert => {
                if j >= seq2.len() {
                    return Err(inconsistent(format!(
                        "insert past end of second sequence at {j}"
                    )));
                }
                score -= scheme.gap_extend as i64;
                if prev != Some(Op::Insert) {
                    score -= scheme.gap_open as i64;
                }
            }
            Op::Delete => {
                if i >= seq1.len() {
                    return Err(inconsistent(format!(
                        "delete past end of first sequence at {i}"
                    )));
                }
                score -= scheme.gap_extend as i64;
                if prev != Some(Op::Delete) {
                    score -= scheme.gap_open as i64;
                }
            }
        }
        let (di, dj) = op.step();
        i += di;
        j += dj;
        prev = Some(op);
    }
    i32::try_from(score)
        .map_err(|_| AlignError::InvalidParameter(format!("path score {score} overflows")))
}

/// Extended CIGAR (`=`, `X`, `I`, `D`) with run-length counts.
pub fn path_to_cigar(ops: &[Op]) -> String {
    let mut out = String::new();
    let mut iter = ops.iter().peekable();
    while let Some(&op) = iter.next() {
        let mut run = 1;
        while iter.next_if(|&&next| next == op).is_some() {
            run += 1;
        }
        out.push_str(&run.to_string());
        out.push(op.symbol());
    }
    out
}

/// Inverse of [`path_to_cigar`].
pub fn parse_cigar(cigar: &str) -> Result<Vec<Op>> {
    let mut ops = Vec::new();
    let mut run: Option<usize> = None;
    for c in cigar.chars() {
        if let Some(d) = c.to_digit(10) {
            let next = run
                .unwrap_or(0)
                .checked_mul(10)
                .and_then(|r| r.checked_add(d as usize));
            run = Some(next.ok_or_else(|| AlignError::BadCigar(cigar.to_string()))?);
        } else {
            let op = Op::from_symbol(c).ok_or_else(|| AlignError::BadCigar(cigar.to_string()))?;
            let n = run
                .take()
                .filter(|&n| n > 0)
                .ok_or_else(|| AlignError::BadCigar(cigar.to_string()))?;
            ops.extend(std::iter::repeat_n(op, n));
        }
    }
    if run.is_some() {
        return Err(AlignError::BadCigar(cigar.to_string()));
    }
    Ok(ops)
}
