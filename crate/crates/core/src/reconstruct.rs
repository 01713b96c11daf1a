//! Linear-space traceback between a known start and end point.
//!
//! A [`Subproblem`] is a rectangle with a known optimal score. Large ones are
//! split at their middle row: a forward pass over the top half and a reverse
//! pass over the bottom half meet in that row, and the best crossing column
//! yields two smaller subproblems with known scores. Small ones are solved by
//! a quadratic traceback.
//!
//! Affine gaps that cross a split row are handled with gap states. Each child
//! is scored standalone, so a gap run cut by the split is charged one opening
//! on each side; the parent adds one `gap_open` back when joining them.

use std::cmp::Ordering;

use crate::error::{AlignError, Result};
use crate::kernel::{Borders, GapState, GotohKernel};
use crate::locate::{padded_diagonals, reversed};
use crate::model::{
    diagonal_op, score_of_path, AlignmentPath, AlignmentSummary, Coord, Op, ScoringScheme, NEG_INF,
};
use crate::wavefront::{DiagonalBand, Engine, PassOptions};

/// Default leaf size: 128 x 128 cells.
pub const DEFAULT_LEAF_LIMIT: usize = 128 * 128;

/// A rectangle `[i0, i1) x [j0, j1)` whose best global alignment, under the
/// given boundary gap states, scores `expected`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subproblem {
    pub i0: usize,
    pub i1: usize,
    pub j0: usize,
    pub j1: usize,
    /// Gap state of the first op.
    pub start: GapState,
    /// Gap state of the last op.
    pub end: GapState,
    pub expected: i32,
}

impl Subproblem {
    pub fn from_summary(summary: &AlignmentSummary) -> Self {
        Self {
            i0: summary.start.i,
            i1: summary.end.i,
            j0: summary.start.j,
            j1: summary.end.j,
            start: GapState::Free,
            end: GapState::Free,
            expected: summary.score,
        }
    }

    pub fn rows(&self) -> usize {
        self.i1 - self.i0
    }

    pub fn cols(&self) -> usize {
        self.j1 - self.j0
    }

    pub fn area(&self) -> usize {
        self.rows().saturating_mul(self.cols())
    }

    pub fn origin(&self) -> Coord {
        Coord::new(self.i0, self.j0)
    }
}

/// Edit-distance style bound on a subproblem's deviation from its corridor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EditBound {
    pub t_edit: i64,
    pub p: i64,
}

impl EditBound {
    /// `t_edit = max(m, n) - floor(score / max_substitution)`, clamped at 0;
    /// padding `ceil((t_edit - (m - n)) / 2)`, clamped at 0.
    pub fn new(score: i32, rows: usize, cols: usize, scheme: &ScoringScheme) -> Self {
        let (n, m) = (rows.min(cols) as i64, rows.max(cols) as i64);
        let t_edit = (m - (score as i64).div_euclid(scheme.max_substitution() as i64)).max(0);
        let p = (t_edit - (m - n) + 1).div_euclid(2).max(0);
        Self { t_edit, p }
    }
}

/// Padding that contains every global alignment of a `rows x cols` region
/// scoring at least `score`. Straying `q` diagonals outside the corridor
/// costs `q` pairs, `2q + (m - n)` gap residues and two openings.
pub fn global_padding(score: i32, rows: usize, cols: usize, scheme: &ScoringScheme) -> i64 {
    let (n, m) = (rows.min(cols) as i64, rows.max(cols) as i64);
    let (ms, ge, go) = (
        scheme.max_substitution() as i64,
        scheme.gap_extend as i64,
        scheme.gap_open as i64,
    );
    (ms * n - ge * (m - n) - score as i64 - 2 * go)
        .div_euclid(ms + 2 * ge)
        .max(0)
}

fn subproblem_band(sub: &Subproblem, scheme: &ScoringScheme) -> DiagonalBand {
    let edit = EditBound::new(sub.expected, sub.rows(), sub.cols(), scheme);
    let p = edit
        .p
        .max(global_padding(sub.expected, sub.rows(), sub.cols(), scheme));
    padded_diagonals(p, sub.rows(), sub.cols())
}

/// Best crossing of the middle row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crossing {
    pub mid: Coord,
    pub upper: i32,
    pub lower: i32,
    /// One `Delete` run spans the middle row.
    pub gap_join: bool,
}

/// Best column of a middle row given the rows from above and below. Returns
/// `(j, combined, gap_join)`; the smallest `j` wins ties and an `H` join is
/// preferred over a gap join at the same `j`.
pub fn combine_rows(
    h_up: &[i32],
    f_up: &[i32],
    h_down: &[i32],
    f_down: &[i32],
    gap_open: i32,
) -> Option<(usize, i64, bool)> {
    let mut best: Option<(usize, i64, bool)> = None;
    for j in 0..h_up.len() {
        let h = h_up[j] as i64 + h_down[j] as i64;
        let f = f_up[j] as i64 + f_down[j] as i64 + gap_open as i64;
        for (v, join) in [(h, false), (f, true)] {
            if best.is_none_or(|(_, b, _)| v > b) {
                best = Some((j, v, join));
            }
        }
    }
    best
}

/// Splits `sub` at its middle row. Coordinates in the result are global.
pub fn find_crossing(
    engine: &Engine,
    a: &[u8],
    b: &[u8],
    scheme: &ScoringScheme,
    sub: &Subproblem,
    band: bool,
) -> Result<(Crossing, u64)> {
    assert!(sub.rows() >= 2, "find_crossing needs two rows");
    let mid = sub.i0 + sub.rows() / 2;
    let cols = sub.cols();
    let opts = PassOptions {
        band: band.then(|| subproblem_band(sub, scheme)),
        ..PassOptions::default()
    };

    let top_a = &a[sub.i0..mid];
    let top_b = &b[sub.j0..sub.j1];
    let top = GotohKernel::new(top_a, top_b, scheme, Borders::Global(sub.start), None);
    let up = engine.run(&engine.plan(top_a.len(), top_b.len()), &top, &opts)?;

    let bot_a = reversed(&a[mid..sub.i1]);
    let bot_b = reversed(top_b);
    let bottom = GotohKernel::new(&bot_a, &bot_b, scheme, Borders::Global(sub.end), None);
    let down = engine.run(&engine.plan(bot_a.len(), bot_b.len()), &bottom, &opts)?;

    // Column 0 of a pass is one delete run, which the border rows leave implicit.
    let (h_up, mut f_up) = (up.last_row.h, up.last_row.g);
    f_up[0] = h_up[0];
    let mut f_rev = down.last_row.g;
    f_rev[0] = down.last_row.h[0];
    let h_down: Vec<i32> = down.last_row.h.into_iter().rev().collect();
    let f_down: Vec<i32> = f_rev.into_iter().rev().collect();
    debug_assert_eq!(h_down.len(), cols + 1);

    let (j, combined, gap_join) = combine_rows(&h_up, &f_up, &h_down, &f_down, scheme.gap_open)
        .expect("middle row is never empty");
    if combined != sub.expected as i64 {
        return Err(AlignError::ScoreMismatch {
            expected: sub.expected,
            found: combined.clamp(i32::MIN as i64, i32::MAX as i64) as i32,
            context: "middle-row crossing",
        });
    }
    let (upper, lower) = if gap_join {
        (f_up[j], f_down[j])
    } else {
        (h_up[j], h_down[j])
    };
    let crossing = Crossing {
        mid: Coord::new(mid, sub.j0 + j),
        upper,
        lower,
        gap_join,
    };
    Ok((crossing, up.stats.cells + down.stats.cells))
}

/// Quadratic-memory global alignment of `a x b` honoring boundary gap
/// states. Returns the optimal score and its ops; the score is at or below
/// [`NEG_INF`] when the states cannot be satisfied. Cells outside `band` are
/// treated as unreachable.
pub fn leaf_align(
    a: &[u8],
    b: &[u8],
    scheme: &ScoringScheme,
    start: GapState,
    end: GapState,
    band: Option<DiagonalBand>,
) -> (i32, Vec<Op>) {
    let (r, c) = (a.len(), b.len());
    let w = c + 1;
    let oe = scheme.open_extend();
    let ge = scheme.gap_extend;
    let gap = |k: usize| (-scheme.gap_cost(k)).max(NEG_INF as i64) as i32;
    let mut h = vec![NEG_INF; (r + 1) * w];
    let mut e = vec![NEG_INF; (r + 1) * w];
    let mut f = vec![NEG_INF; (r + 1) * w];
    if start == GapState::Free {
        h[0] = 0;
        for j in 1..=c {
            h[j] = gap(j);
            e[j] = h[j];
        }
    }
    for i in 1..=r {
        f[i * w] = gap(i);
        h[i * w] = f[i * w];
    }
    for i in 1..=r {
        let prof = a[i - 1];
        for j in 1..=c {
            if band.is_some_and(|bd| !bd.contains(i, j)) {
                continue;
            }
            let k = i * w + j;
            let ev = (h[k - 1] - oe).max(e[k - 1] - ge).max(NEG_INF);
            let fv = (h[k - w] - oe).max(f[k - w] - ge).max(NEG_INF);
            e[k] = ev;
            f[k] = fv;
            h[k] = (h[k - w - 1] + scheme.sub(prof, b[j - 1]))
                .max(ev)
                .max(fv)
                .max(NEG_INF);
        }
    }

    #[derive(Clone, Copy, PartialEq)]
    enum State {
        H,
        E,
        F,
    }
    let last = r * w + c;
    let (score, mut state) = match end {
        GapState::Delete if r == 0 => (NEG_INF, State::F),
        GapState::Delete => (f[last], State::F),
        GapState::Free => (h[last], State::H),
    };
    if score <= NEG_INF {
        return (NEG_INF, Vec::new());
    }

    let mut ops = Vec::with_capacity(r + c);
    let (mut i, mut j) = (r, c);
    while i > 0 || j > 0 {
        let k = i * w + j;
        match state {
            State::H if i == 0 => {
                ops.extend(std::iter::repeat_n(Op::Insert, j));
                j = 0;
            }
            State::H if j == 0 => state = State::F,
            State::H => {
                let (x, y) = (a[i - 1], b[j - 1]);
                if h[k] == h[k - w - 1] + scheme.sub(x, y) {
                    ops.push(diagonal_op(x, y));
                    i -= 1;
                    j -= 1;
                } else if h[k] == e[k] {
                    state = State::E;
                } else {
                    state = State::F;
                }
            }
            State::E => {
                ops.push(Op::Insert);
                if e[k] == h[k - 1] - oe {
                    state = State::H;
                }
                j -= 1;
            }
            State::F => {
                ops.push(Op::Delete);
                if j > 0 && f[k] == h[k - w] - oe {
                    state = State::H;
                }
                i -= 1;
            }
        }
    }
    ops.reverse();
    (score, ops)
}

/// Concatenates coordinate-contiguous paths.
pub fn join_paths(parts: Vec<AlignmentPath>) -> Result<AlignmentPath> {
    let mut iter = parts.into_iter();
    let Some(mut joined) = iter.next() else {
        return Ok(AlignmentPath::default());
    };
    for part in iter {
        let left = joined.end();
        if left != part.start {
            return Err(AlignError::DiscontiguousParts {
                left,
                right: part.start,
            });
        }
        joined.ops.extend(part.ops);
    }
    Ok(joined)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReconstructConfig {
    /// Subproblems with at most this many cells are solved directly.
    pub leaf_limit: usize,
    pub band: bool,
    /// Solve sibling subproblems concurrently.
    pub concurrent: bool,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        Self {
            leaf_limit: DEFAULT_LEAF_LIMIT,
            band: true,
            concurrent: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReconstructStats {
    pub splits: usize,
    pub leaves: usize,
    pub max_depth: usize,
    pub split_cells: u64,
    pub leaf_cells: u64,
    pub largest_leaf: usize,
}

impl ReconstructStats {
    fn merge(self, other: Self) -> Self {
        Self {
            splits: self.splits + other.splits,
            leaves: self.leaves + other.leaves,
            max_depth: self.max_depth.max(other.max_depth),
            split_cells: self.split_cells + other.split_cells,
            leaf_cells: self.leaf_cells + other.leaf_cells,
            largest_leaf: self.largest_leaf.max(other.largest_leaf),
        }
    }
}

struct Solver<'a> {
    engine: &'a Engine,
    a: &'a [u8],
    b: &'a [u8],
    scheme: &'a ScoringScheme,
    config: ReconstructConfig,
}

impl Solver<'_> {
    fn solve(&self, sub: Subproblem, depth: usize) -> Result<(Vec<Op>, ReconstructStats)> {
        if sub.rows() < 2 || sub.cols() == 0 || sub.area() <= self.config.leaf_limit {
            return self.leaf(sub, depth);
        }
        let (cross, cells) = find_crossing(
            self.engine,
            self.a,
            self.b,
            self.scheme,
            &sub,
            self.config.band,
        )?;
        let join = if cross.gap_join {
            GapState::Delete
        } else {
            GapState::Free
        };
        let upper = Subproblem {
            i1: cross.mid.i,
            j1: cross.mid.j,
            end: join,
            expected: cross.upper,
            ..sub
        };
        let lower = Subproblem {
            i0: cross.mid.i,
            j0: cross.mid.j,
            start: join,
            expected: cross.lower,
            ..sub
        };
        let (up, down) = if self.config.concurrent {
            rayon::join(
                || self.solve(upper, depth + 1),
                || self.solve(lower, depth + 1),
            )
        } else {
            (self.solve(upper, depth + 1), self.solve(lower, depth + 1))
        };
        let ((mut ops, s1), (tail, s2)) = (up?, down?);
        ops.extend(tail);
        let own = ReconstructStats {
            splits: 1,
            max_depth: depth,
            split_cells: cells,
            ..ReconstructStats::default()
        };
        Ok((ops, own.merge(s1).merge(s2)))
    }

    fn leaf(&self, sub: Subproblem, depth: usize) -> Result<(Vec<Op>, ReconstructStats)> {
        let band = self.config.band.then(|| subproblem_band(&sub, self.scheme));
        let (score, ops) = leaf_align(
            &self.a[sub.i0..sub.i1],
            &self.b[sub.j0..sub.j1],
            self.scheme,
            sub.start,
            sub.end,
            band,
        );
        if score != sub.expected {
            return Err(AlignError::ScoreMismatch {
                expected: sub.expected,
                found: score,
                context: "leaf traceback",
            });
        }
        let stats = ReconstructStats {
            leaves: 1,
            max_depth: depth,
            leaf_cells: sub.area() as u64,
            largest_leaf: sub.area(),
            ..ReconstructStats::default()
        };
        Ok((ops, stats))
    }
}

/// Solves one subproblem and returns its path from `sub.origin()`.
pub fn solve_subproblem(
    engine: &Engine,
    a: &[u8],
    b: &[u8],
    scheme: &ScoringScheme,
    sub: Subproblem,
    config: ReconstructConfig,
) -> Result<(AlignmentPath, ReconstructStats)> {
    let solver = Solver {
        engine,
        a,
        b,
        scheme,
        config,
    };
    let (ops, stats) = engine.install(|| solver.solve(sub, 0))?;
    Ok((AlignmentPath::new(sub.origin(), ops), stats))
}

/// Full path of the local alignment described by `summary`.
pub fn reconstruct(
    engine: &Engine,
    a: &[u8],
    b: &[u8],
    scheme: &ScoringScheme,
    summary: &AlignmentSummary,
    config: ReconstructConfig,
) -> Result<(AlignmentPath, ReconstructStats)> {
    if summary.start == summary.end {
        return Ok((
            AlignmentPath::empty(summary.start),
            ReconstructStats::default(),
        ));
    }
    let (path, stats) = solve_subproblem(
        engine,
        a,
        b,
        scheme,
        Subproblem::from_summary(summary),
        config,
    )?;
    let found = score_of_path(&path, a, b, scheme)?;
    match found.cmp(&summary.score) {
        Ordering::Equal => Ok((path, stats)),
        _ => Err(AlignError::ScoreMismatch {
            expected: summary.score,
            found,
            context: "reconstructed path",
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Alphabet;
    use crate::oracle::{oracle_global, oracle_local, rescore, BorderRule};
    use crate::wavefront::EngineConfig;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn engine(workers: usize, dim: usize) -> Engine {
        Engine::new(EngineConfig {
            workers,
            block_rows: dim,
            block_cols: dim,
        })
        .unwrap()
    }

    fn dna(m: i32, x: i32, go: i32, ge: i32) -> ScoringScheme {
        ScoringScheme::match_mismatch(&Alphabet::dna(false), m, x, go, ge).unwrap()
    }

    fn random_scheme(rng: &mut ChaCha8Rng) -> ScoringScheme {
        dna(
            rng.gen_range(1..=5),
            rng.gen_range(-5..=-1),
            rng.gen_range(0..=10),
            rng.gen_range(1..=5),
        )
    }

    fn related(rng: &mut ChaCha8Rng, n: usize) -> (Vec<u8>, Vec<u8>) {
        let a: Vec<u8> = (0..n).map(|_| rng.gen_range(0..4)).collect();
        let mut b = Vec::with_capacity(n);
        for &x in &a {
            match rng.gen_range(0..20) {
                0 => {}
                1 => b.extend([x, rng.gen_range(0..4)]),
                2 => b.push(rng.gen_range(0..4)),
                _ => b.push(x),
            }
        }
        (a, b)
    }

    #[test]
    fn crossing_example() {
        let ninf = [NEG_INF; 3];
        assert_eq!(
            combine_rows(&[0, 2, 1], &ninf, &[1, 2, 0], &ninf, 5),
            Some((1, 4, false))
        );
        // ties go to the smaller column, and to the H join
        assert_eq!(
            combine_rows(&[1, 0], &[0, 0], &[1, 2], &[-1, 0], 1),
            Some((0, 2, false))
        );
        assert_eq!(
            combine_rows(&[0, 0], &[0, 0], &[0, 0], &[0, 0], 1),
            Some((0, 1, true))
        );
    }

    #[test]
    fn all_match_square_crosses_on_diagonal() {
        let alpha = Alphabet::dna(false);
        let s = dna(1, -3, 5, 2);
        let a = alpha.encode(b"AAAA").unwrap();
        let sub = Subproblem {
            i0: 0,
            i1: 4,
            j0: 0,
            j1: 4,
            start: GapState::Free,
            end: GapState::Free,
            expected: 4,
        };
        let (c, _) = find_crossing(&engine(1, 2), &a, &a, &s, &sub, true).unwrap();
        assert_eq!(
            c,
            Crossing {
                mid: Coord::new(2, 2),
                upper: 2,
                lower: 2,
                gap_join: false
            }
        );
    }

    #[test]
    fn wrong_expectation_is_reported() {
        let alpha = Alphabet::dna(false);
        let s = dna(1, -3, 5, 2);
        let a = alpha.encode(b"ACGTACGT").unwrap();
        let sub = Subproblem {
            i0: 0,
            i1: 8,
            j0: 0,
            j1: 8,
            start: GapState::Free,
            end: GapState::Free,
            expected: 7,
        };
        assert!(matches!(
            find_crossing(&engine(1, 3), &a, &a, &s, &sub, false),
            Err(AlignError::ScoreMismatch { .. })
        ));
    }

    #[test]
    fn leaf_examples() {
        let s = dna(1, -3, 5, 2);
        assert_eq!(
            leaf_align(&[2], &[2], &s, GapState::Free, GapState::Free, None),
            (1, vec![Op::Match])
        );
        assert_eq!(
            leaf_align(&[], &[0, 1, 2], &s, GapState::Free, GapState::Free, None),
            (-11, vec![Op::Insert; 3])
        );
        assert_eq!(
            leaf_align(&[0, 1], &[], &s, GapState::Delete, GapState::Delete, None),
            (-9, vec![Op::Delete; 2])
        );
        // a forced leading delete where a match would be free
        let (sc, ops) = leaf_align(&[0, 0], &[0], &s, GapState::Delete, GapState::Free, None);
        assert_eq!((sc, ops), (-6, vec![Op::Delete, Op::Match]));
        let (sc, _) = leaf_align(&[], &[0], &s, GapState::Delete, GapState::Free, None);
        assert!(sc <= NEG_INF);
    }

    #[test]
    fn join_examples() {
        let s = dna(1, -3, 5, 2);
        let j = join_paths(vec![
            AlignmentPath::new(Coord::new(0, 0), vec![Op::Match; 2]),
            AlignmentPath::new(Coord::new(2, 2), vec![Op::Match; 2]),
        ])
        .unwrap();
        assert_eq!(j, AlignmentPath::new(Coord::new(0, 0), vec![Op::Match; 4]));
        let j = join_paths(vec![
            AlignmentPath::new(Coord::new(0, 0), vec![Op::Match, Op::Delete]),
            AlignmentPath::new(Coord::new(2, 1), vec![Op::Delete, Op::Match]),
        ])
        .unwrap();
        assert_eq!(
            score_of_path(&j, &[0, 1, 2, 3], &[0, 3], &s).unwrap(),
            1 - 9 + 1
        );
        assert_eq!(
            join_paths(vec![
                AlignmentPath::new(Coord::new(0, 0), vec![Op::Match]),
                AlignmentPath::new(Coord::new(2, 2), vec![Op::Match]),
            ]),
            Err(AlignError::DiscontiguousParts {
                left: Coord::new(1, 1),
                right: Coord::new(2, 2)
            })
        );
    }

    #[test]
    fn band_examples() {
        let s = dna(1, -3, 5, 2);
        assert_eq!(
            EditBound::new(10, 10, 10, &s),
            EditBound { t_edit: 0, p: 0 }
        );
        assert_eq!(EditBound::new(4, 10, 12, &s), EditBound { t_edit: 8, p: 3 });
        assert_eq!(EditBound::new(-5, 2, 9, &s), EditBound { t_edit: 14, p: 4 });
        assert_eq!(global_padding(10, 10, 10, &s), 0);
        // 1*10 - 0 - 0 - 0 over 1 + 2 with go = 0
        assert_eq!(global_padding(0, 10, 10, &dna(1, -3, 0, 1)), 3);
    }

    #[test]
    fn simple_reconstruction() {
        let alpha = Alphabet::dna(false);
        let s = dna(1, -3, 5, 2);
        let a = alpha.encode(b"ACGT").unwrap();
        let summary = AlignmentSummary {
            score: 4,
            start: Coord::new(0, 0),
            end: Coord::new(4, 4),
        };
        let cfg = ReconstructConfig {
            leaf_limit: 1,
            ..ReconstructConfig::default()
        };
        let (p, st) = reconstruct(&engine(1, 2), &a, &a, &s, &summary, cfg).unwrap();
        assert_eq!(p.ops, vec![Op::Match; 4]);
        assert!(st.splits > 0);
        let empty = AlignmentSummary::EMPTY;
        assert!(reconstruct(&engine(1, 2), &a, &a, &s, &empty, cfg)
            .unwrap()
            .0
            .is_empty());
    }

    /// Leaves against the oracle, free states only.
    #[test]
    fn random_leaves_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let s = random_scheme(&mut rng);
            let a: Vec<u8> = (0..rng.gen_range(0..50))
                .map(|_| rng.gen_range(0..4))
                .collect();
            let b: Vec<u8> = (0..rng.gen_range(0..50))
                .map(|_| rng.gen_range(0..4))
                .collect();
            let (sc, ops) = leaf_align(&a, &b, &s, GapState::Free, GapState::Free, None);
            let (expected, _) = oracle_global(&a, &b, &s, BorderRule::AffineGaps)
                .unwrap()
                .unwrap();
            assert_eq!(sc, expected);
            let path = AlignmentPath::new(Coord::default(), ops);
            assert_eq!(path.end(), Coord::new(a.len(), b.len()));
            assert_eq!(rescore(&path, &a, &b, &s), expected as i64);
        }
    }

    /// Every split decomposes the optimum into children whose scores add up.
    #[test]
    fn random_crossings_decompose_the_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let e = engine(2, 32);
        for _ in 0..20 {
            let s = random_scheme(&mut rng);
            let (a, b) = related(&mut rng, 200);
            let (expected, _) = oracle_global(&a, &b, &s, BorderRule::AffineGaps)
                .unwrap()
                .unwrap();
            let sub = Subproblem {
                i0: 0,
                i1: a.len(),
                j0: 0,
                j1: b.len(),
                start: GapState::Free,
                end: GapState::Free,
                expected,
            };
            let (c, _) = find_crossing(&e, &a, &b, &s, &sub, true).unwrap();
            let extra = if c.gap_join { s.gap_open } else { 0 };
            assert_eq!(c.upper + c.lower + extra, expected);
            let (up, _) = oracle_global(&a[..c.mid.i], &b[..c.mid.j], &s, BorderRule::AffineGaps)
                .unwrap()
                .unwrap();
            let (down, _) = oracle_global(&a[c.mid.i..], &b[c.mid.j..], &s, BorderRule::AffineGaps)
                .unwrap()
                .unwrap();
            if !c.gap_join {
                assert_eq!((c.upper, c.lower), (up, down));
            }
        }
    }

    #[test]
    fn random_reconstructions_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let e = engine(2, 16);
        for round in 0..300 {
            let s = random_scheme(&mut rng);
            let n = rng.gen_range(1..=300);
            let (a, b) = if round % 2 == 0 {
                related(&mut rng, n)
            } else {
                let m = rng.gen_range(1..=300);
                (
                    (0..n).map(|_| rng.gen_range(0..4)).collect(),
                    (0..m).map(|_| rng.gen_range(0..4)).collect(),
                )
            };
            let (summary, _) = oracle_local(&a, &b, &s).unwrap();
            for leaf_limit in [1, 16, 64 * 64] {
                for band in [true, false] {
                    let cfg = ReconstructConfig {
                        leaf_limit,
                        band,
                        concurrent: round % 3 == 0,
                    };
                    let (path, _) = reconstruct(&e, &a, &b, &s, &summary, cfg).unwrap();
                    assert_eq!(path.start, summary.start);
                    assert_eq!(path.end(), summary.end);
                    assert_eq!(rescore(&path, &a, &b, &s), summary.score as i64);
                }
            }
        }
    }

    #[test]
    fn serial_and_concurrent_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let e = engine(4, 64);
        let s = dna(2, -3, 4, 1);
        let (a, b) = related(&mut rng, 3000);
        let sub = Subproblem {
            i0: 0,
            i1: a.len(),
            j0: 0,
            j1: b.len(),
            start: GapState::Free,
            end: GapState::Free,
            expected: 0,
        };
        let mut cfg = ReconstructConfig {
            leaf_limit: 32 * 32,
            band: true,
            concurrent: false,
        };
        let expected = {
            let e1 = engine(1, 512);
            let k = GotohKernel::new(&a, &b, &s, Borders::Global(GapState::Free), None);
            e1.run(&e1.plan(a.len(), b.len()), &k, &PassOptions::default())
                .unwrap()
                .last_row
                .h[b.len()]
        };
        let sub = Subproblem { expected, ..sub };
        let (serial, st) = solve_subproblem(&e, &a, &b, &s, sub, cfg).unwrap();
        cfg.concurrent = true;
        let (concurrent, _) = solve_subproblem(&e, &a, &b, &s, sub, cfg).unwrap();
        assert_eq!(serial, concurrent);
        assert!(st.splits > 100);
        assert_eq!(score_of_path(&serial, &a, &b, &s).unwrap(), expected);
    }

    proptest! {
        /// Forced boundary states in leaves agree with the splitter: a
        /// subproblem solved directly and via one split has the same score.
        #[test]
        fn states_are_consistent_between_leaf_and_split(
            a in proptest::collection::vec(0u8..4, 2..30),
            b in proptest::collection::vec(0u8..4, 1..30),
            start_delete: bool, end_delete: bool,
            go in 0i32..6, ge in 1i32..4,
        ) {
            let s = dna(2, -2, go, ge);
            let st = |d: bool| if d { GapState::Delete } else { GapState::Free };
            let (expected, ops) = leaf_align(&a, &b, &s, st(start_delete), st(end_delete), None);
            prop_assume!(expected > NEG_INF);
            let path = AlignmentPath::new(Coord::default(), ops.clone());
            prop_assert_eq!(score_of_path(&path, &a, &b, &s).unwrap(), expected);
            if start_delete { prop_assert_eq!(ops.first(), Some(&Op::Delete)); }
            if end_delete { prop_assert_eq!(ops.last(), Some(&Op::Delete)); }
            let sub = Subproblem { i0: 0, i1: a.len(), j0: 0, j1: b.len(), start: st(start_delete), end: st(end_delete), expected };
            let cfg = ReconstructConfig { leaf_limit: 1, band: true, concurrent: false };
            let (p, _) = solve_subproblem(&engine(1, 4), &a, &b, &s, sub, cfg).unwrap();
            prop_assert_eq!(score_of_path(&p, &a, &b, &s).unwrap(), expected);
            prop_assert_eq!(p.end(), Coord::new(a.len(), b.len()));
        }
    }
}
