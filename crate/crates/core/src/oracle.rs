//! Full-matrix Gotoh alignment with complete traceback.
//!
//! Quadratic in time and memory and deliberately unoptimized: this is the
//! ground truth the linear-memory pipeline is checked against. Arithmetic is
//! done in `i64` so it shares no overflow assumptions with the engine.

use crate::error::{AlignError, Result};
use crate::model::{diagonal_op, AlignmentPath, AlignmentSummary, Coord, Op, ScoringScheme};

pub const DEFAULT_CELL_BUDGET: u128 = 100_000_000;

const MINUS_INF: i64 = i64::MIN / 4;

/// Border initialization for global alignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BorderRule {
    /// Leading gaps cost `gap_open + k * gap_extend`.
    AffineGaps,
    /// Origin is 0, every other border cell is minus infinity: the first
    /// column must be a residue pair.
    MinusInfinity,
}

#[derive(Debug, Clone, Copy)]
pub struct Oracle {
    pub cell_budget: u128,
}

impl Default for Oracle {
    fn default() -> Self {
        Self {
            cell_budget: DEFAULT_CELL_BUDGET,
        }
    }
}

struct Matrices {
    cols: usize,
    h: Vec<i64>,
    e: Vec<i64>,
    f: Vec<i64>,
}

impl Matrices {
    fn at(&self, i: usize, j: usize) -> usize {
        i * self.cols + j
    }
}

#[derive(Clone, Copy, PartialEq)]
enum State {
    H,
    E,
    F,
}

impl Oracle {
    fn check_budget(&self, n: usize, m: usize) -> Result<()> {
        let cells = (n as u128 + 1) * (m as u128 + 1);
        if cells > self.cell_budget {
            return Err(AlignError::OracleBudget {
                cells,
                budget: self.cell_budget,
            });
        }
        Ok(())
    }

    fn fill(
        &self,
        a: &[u8],
        b: &[u8],
        s: &ScoringScheme,
        local: bool,
        border: BorderRule,
    ) -> Matrices {
        let (n, m) = (a.len(), b.len());
        let cols = m + 1;
        let mut mx = Matrices {
            cols,
            h: vec![MINUS_INF; (n + 1) * cols],
            e: vec![MINUS_INF; (n + 1) * cols],
            f: vec![MINUS_INF; (n + 1) * cols],
        };
        let go = s.gap_open as i64;
        let ge = s.gap_extend as i64;
        mx.h[0] = 0;
        for j in 1..=m {
            let at = mx.at(0, j);
            if local {
                mx.h[at] = 0;
            } else if border == BorderRule::AffineGaps {
                mx.e[at] = -go - ge * j as i64;
                mx.h[at] = mx.e[at];
            }
        }
        for i in 1..=n {
            let at = mx.at(i, 0);
            if local {
                mx.h[at] = 0;
            } else if border == BorderRule::AffineGaps {
                mx.f[at] = -go - ge * i as i64;
                mx.h[at] = mx.f[at];
            }
        }
        for i in 1..=n {
            for j in 1..=m {
                let here = mx.at(i, j);
                let left = mx.at(i, j - 1);
                let up = mx.at(i - 1, j);
                let diag = mx.at(i - 1, j - 1);
                let e = (mx.h[left] - go - ge).max(mx.e[left] - ge);
                let f = (mx.h[up] - go - ge).max(mx.f[up] - ge);
                let d = mx.h[diag] + s.sub(a[i - 1], b[j - 1]) as i64;
                let mut h = d.max(e).max(f);
                if local {
                    h = h.max(0);
                }
                mx.e[here] = e.max(MINUS_INF);
                mx.f[here] = f.max(MINUS_INF);
                mx.h[here] = h.max(MINUS_INF);
            }
        }
        mx
    }

    /// Walks back from `(i, j)` in `state`. Tie-break: diagonal, then gap in
    /// the second sequence (E), then gap in the first (F); within a gap,
    /// opening beats extending.
    fn traceback(
        mx: &Matrices,
        a: &[u8],
        b: &[u8],
        s: &ScoringScheme,
        local: bool,
        (mut i, mut j): (usize, usize),
    ) -> AlignmentPath {
        let go = s.gap_open as i64;
        let ge = s.gap_extend as i64;
        let mut ops = Vec::new();
        let mut state = State::H;
        loop {
            match state {
                State::H => {
                    let h = mx.h[mx.at(i, j)];
                    if (i == 0 && j == 0) || (local && h == 0) {
                        break;
                    }
                    if i > 0
                        && j > 0
                        && h == mx.h[mx.at(i - 1, j - 1)] + s.sub(a[i - 1], b[j - 1]) as i64
                    {
                        ops.push(diagonal_op(a[i - 1], b[j - 1]));
                        i -= 1;
                        j -= 1;
                    } else if h == mx.e[mx.at(i, j)] {
                        state = State::E;
                    } else {
                        debug_assert_eq!(h, mx.f[mx.at(i, j)]);
                        state = State::F;
                    }
                }
                State::E => {
                    ops.push(Op::Insert);
                    let e = mx.e[mx.at(i, j)];
                    let opened = j == 1 && i == 0 || e == mx.h[mx.at(i, j - 1)] - go - ge;
                    j -= 1;
                    if opened {
                        state = State::H;
                    }
                }
                State::F => {
                    ops.push(Op::Delete);
                    let f = mx.f[mx.at(i, j)];
                    let opened = i == 1 && j == 0 || f == mx.h[mx.at(i - 1, j)] - go - ge;
                    i -= 1;
                    if opened {
                        state = State::H;
                    }
                }
            }
        }
        ops.reverse();
        AlignmentPath::new(Coord::new(i, j), ops)
    }

    /// Best local alignment. Among co-optimal endpoints the lexicographically
    /// smallest `(end.i, end.j)` wins.
    pub fn local(
        &self,
        a: &[u8],
        b: &[u8],
        s: &ScoringScheme,
    ) -> Result<(AlignmentSummary, AlignmentPath)> {
        self.check_budget(a.len(), b.len())?;
        let mx = self.fill(a, b, s, true, BorderRule::AffineGaps);
        let (mut best, mut end) = (0i64, (0, 0));
        for i in 0..=a.len() {
            for j in 0..=b.len() {
                if mx.h[mx.at(i, j)] > best {
                    best = mx.h[mx.at(i, j)];
                    end = (i, j);
                }
            }
        }
        if best == 0 {
            return Ok((
                AlignmentSummary::EMPTY,
                AlignmentPath::empty(Coord::new(0, 0)),
            ));
        }
        let path = Self::traceback(&mx, a, b, s, true, end);
        let summary = AlignmentSummary {
            score: best as i32,
            start: path.start,
            end: Coord::new(end.0, end.1),
        };
        Ok((summary, path))
    }

    /// Optimal global alignment of the full sequences, `None` when the border
    /// rule makes every alignment infeasible.
    pub fn global(
        &self,
        a: &[u8],
        b: &[u8],
        s: &ScoringScheme,
        border: BorderRule,
    ) -> Result<Option<(i32, AlignmentPath)>> {
        self.check_budget(a.len(), b.len())?;
        let mx = self.fill(a, b, s, false, border);
        let score = mx.h[mx.at(a.len(), b.len())];
        if score <= MINUS_INF / 2 {
            return Ok(None);
        }
        let path = Self::traceback(&mx, a, b, s, false, (a.len(), b.len()));
        Ok(Some((score as i32, path)))
    }
}

pub fn oracle_local(
    a: &[u8],
    b: &[u8],
    s: &ScoringScheme,
) -> Result<(AlignmentSummary, AlignmentPath)> {
    Oracle::default().local(a, b, s)
}

pub fn oracle_global(
    a: &[u8],
    b: &[u8],
    s: &ScoringScheme,
    border: BorderRule,
) -> Result<Option<(i32, AlignmentPath)>> {
    Oracle::default().global(a, b, s, border)
}

/// Single-pass re-scorer that shares nothing with [`crate::model::score_of_path`]:
/// sums per-column scores, charging `gap_open` whenever a gap column follows a
/// column of a different kind.
pub fn rescore(path: &AlignmentPath, a: &[u8], b: &[u8], s: &ScoringScheme) -> i64 {
    let (mut i, mut j) = (path.start.i, path.start.j);
    let mut total = 0i64;
    let mut last = None;
    for &op in &path.ops {
        total += match op {
            Op::Match | Op::Mismatch => {
                i += 1;
                j += 1;
                s.sub(a[i - 1], b[j - 1]) as i64
            }
            Op::Insert => {
                j += 1;
                -(s.gap_extend as i64)
                    - if last == Some(Op::Insert) {
                        0
                    } else {
                        s.gap_open as i64
                    }
            }
            Op::Delete => {
                i += 1;
                -(s.gap_extend as i64)
                    - if last == Some(Op::Delete) {
                        0
                    } else {
                        s.gap_open as i64
                    }
            }
        };
        last = Some(op);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{score_of_path, Alphabet, AlphabetKind};
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn dna(s: &str) -> Vec<u8> {
        Alphabet::dna(false).encode(s.as_bytes()).unwrap()
    }

    fn scheme(m: i32, x: i32, go: i32, ge: i32) -> ScoringScheme {
        ScoringScheme::match_mismatch(&Alphabet::dna(false), m, x, go, ge).unwrap()
    }

    #[test]
    fn identical_sequences_align_fully() {
        let a = dna("ACGT");
        let (sum, path) = oracle_local(&a, &a, &scheme(1, -3, 5, 2)).unwrap();
        assert_eq!(sum.score, 4);
        assert_eq!(sum.start, Coord::new(0, 0));
        assert_eq!(sum.end, Coord::new(4, 4));
        assert_eq!(path.ops, vec![Op::Match; 4]);
    }

    #[test]
    fn disjoint_sequences_give_empty_alignment() {
        let (sum, path) = oracle_local(&dna("GGG"), &dna("CCC"), &scheme(1, -1, 1, 1)).unwrap();
        assert_eq!(sum, AlignmentSummary::EMPTY);
        assert!(path.is_empty());
    }

    /// Memoized recursion over (i, j, state), written without any matrices.
    fn recursive_local(a: &[u8], b: &[u8], s: &ScoringScheme) -> i64 {
        fn best(
            a: &[u8],
            b: &[u8],
            s: &ScoringScheme,
            i: usize,
            j: usize,
            st: u8,
            memo: &mut HashMap<(usize, usize, u8), i64>,
        ) -> i64 {
            // Best score of an alignment ending at (i, j) in state st
            // (0 = any, 1 = ends with insert, 2 = ends with delete).
            if let Some(&v) = memo.get(&(i, j, st)) {
                return v;
            }
            let (go, ge) = (s.gap_open as i64, s.gap_extend as i64);
            let v = match st {
                0 => {
                    let mut v = 0;
                    if i > 0 && j > 0 {
                        v = v.max(
                            best(a, b, s, i - 1, j - 1, 0, memo) + s.sub(a[i - 1], b[j - 1]) as i64,
                        );
                    }
                    v.max(best(a, b, s, i, j, 1, memo))
                        .max(best(a, b, s, i, j, 2, memo))
                }
                1 if j > 0 => (best(a, b, s, i, j - 1, 0, memo) - go - ge)
                    .max(best(a, b, s, i, j - 1, 1, memo) - ge),
                2 if i > 0 => (best(a, b, s, i - 1, j, 0, memo) - go - ge)
                    .max(best(a, b, s, i - 1, j, 2, memo) - ge),
                _ => MINUS_INF,
            };
            memo.insert((i, j, st), v);
            v
        }
        let mut memo = HashMap::new();
        let mut top = 0;
        for i in 0..=a.len() {
            for j in 0..=b.len() {
                top = top.max(best(a, b, s, i, j, 0, &mut memo));
            }
        }
        top
    }

    #[test]
    fn classic_linear_gap_instance() {
        let (a, b) = (dna("ACACACTA"), dna("AGCACACA"));
        let s = scheme(2, -1, 0, 1);
        assert_eq!(recursive_local(&a, &b, &s), 12);
        let (sum, path) = oracle_local(&a, &b, &s).unwrap();
        assert_eq!(sum.score, 12);
        assert_eq!(score_of_path(&path, &a, &b, &s).unwrap(), 12);
        assert_eq!(path.end(), sum.end);
    }

    #[test]
    fn global_examples() {
        let s = scheme(1, -1, 2, 1);
        let (score, path) = oracle_global(&dna("A"), &dna("A"), &s, BorderRule::AffineGaps)
            .unwrap()
            .unwrap();
        assert_eq!((score, path.ops), (1, vec![Op::Match]));
        let (score, path) = oracle_global(&dna("AA"), &[], &s, BorderRule::AffineGaps)
            .unwrap()
            .unwrap();
        assert_eq!((score, path.ops), (-4, vec![Op::Delete, Op::Delete]));
        assert!(
            oracle_global(&dna("AA"), &[], &s, BorderRule::MinusInfinity)
                .unwrap()
                .is_none()
        );
        let (score, path) = oracle_global(&dna("AC"), &dna("A"), &s, BorderRule::MinusInfinity)
            .unwrap()
            .unwrap();
        assert_eq!((score, path.ops), (-2, vec![Op::Match, Op::Delete]));
    }

    #[test]
    fn budget_is_enforced() {
        let o = Oracle { cell_budget: 10 };
        assert!(matches!(
            o.local(&dna("ACGT"), &dna("ACGT"), &scheme(1, -1, 1, 1)),
            Err(AlignError::OracleBudget { .. })
        ));
    }

    /// Local optimum equals the best global score over all substring pairs.
    #[test]
    fn local_is_max_over_substring_globals_exhaustive() {
        let alphabet = Alphabet::custom(AlphabetKind::Nucleotide, b"AB").unwrap();
        let schemes = [
            ScoringScheme::match_mismatch(&alphabet, 1, -1, 0, 1).unwrap(),
            ScoringScheme::match_mismatch(&alphabet, 2, -3, 3, 1).unwrap(),
        ];
        let words = |len: usize| {
            (0..1u32 << len).map(move |bits| {
                (0..len)
                    .map(|k| ((bits >> k) & 1) as u8)
                    .collect::<Vec<u8>>()
            })
        };
        let mut checked = 0;
        for s in &schemes {
            for la in [1usize, 3, 5, 8] {
                for a in words(la).step_by(if la == 8 { 37 } else { 1 }) {
                    for lb in [2usize, 4, 8] {
                        for b in words(lb).step_by(if lb == 8 { 41 } else { 3 }) {
                            let (local, _) = oracle_local(&a, &b, s).unwrap();
                            let mut best = 0;
                            for i0 in 0..=a.len() {
                                for i1 in i0..=a.len() {
                                    for j0 in 0..=b.len() {
                                        for j1 in j0..=b.len() {
                                            let (g, _) = oracle_global(
                                                &a[i0..i1],
                                                &b[j0..j1],
                                                s,
                                                BorderRule::AffineGaps,
                                            )
                                            .unwrap()
                                            .unwrap();
                                            best = best.max(g);
                                        }
                                    }
                                }
                            }
                            assert_eq!(local.score, best);
                            checked += 1;
                        }
                    }
                }
            }
        }
        assert!(checked > 100);
    }

    fn seq_strategy(max: usize) -> impl Strategy<Value = Vec<u8>> {
        proptest::collection::vec(0u8..4, 1..max)
    }

    proptest! {
        #[test]
        fn local_score_symmetric(a in seq_strategy(40), b in seq_strategy(40), go in 0i32..6, ge in 1i32..4) {
            let s = scheme(2, -3, go, ge);
            let (x, px) = oracle_local(&a, &b, &s).unwrap();
            let (y, _) = oracle_local(&b, &a, &s).unwrap();
            prop_assert_eq!(x.score, y.score);
            prop_assert_eq!(rescore(&px, &a, &b, &s), x.score as i64);
            prop_assert_eq!(score_of_path(&px, &a, &b, &s).unwrap(), x.score);
            prop_assert_eq!(px.end(), x.end);
        }

        #[test]
        fn extension_never_lowers_local_score(a in seq_strategy(30), b in seq_strategy(30), extra in seq_strategy(5), front in any::<bool>()) {
            let s = scheme(1, -2, 2, 1);
            let (base, _) = oracle_local(&a, &b, &s).unwrap();
            let longer: Vec<u8> = if front { extra.iter().chain(&a).copied().collect() } else { a.iter().chain(&extra).copied().collect() };
            let (ext, _) = oracle_local(&longer, &b, &s).unwrap();
            prop_assert!(ext.score >= base.score);
        }

        #[test]
        fn global_path_rescores(a in seq_strategy(30), b in seq_strategy(30), go in 0i32..6, ge in 1i32..4) {
            let s = scheme(3, -2, go, ge);
            let (score, path) = oracle_global(&a, &b, &s, BorderRule::AffineGaps).unwrap().unwrap();
            prop_assert_eq!(rescore(&path, &a, &b, &s), score as i64);
            prop_assert_eq!(path.end(), Coord::new(a.len(), b.len()));
        }
    }
}
