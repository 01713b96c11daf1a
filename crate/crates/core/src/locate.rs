//! Start-point location: an anchored pass over the reversed prefixes ending at
//! the known end point, pruned to a diagonal band derived from the score.
//!
//! Band formulas, for a short extent `n`, long extent `m` and score `S`:
//!
//! ```text
//! t  = floor(S / max_substitution)                  (clamped to n)
//! m' = min(n + floor((n - t) / gap_extend), m)
//! p  = max(0, ceil((2n - t - m') / 2))
//! admissible: -p <= long_index - short_index <= p + (m - n)
//! ```
//!
//! That padding can be narrower than the deviation an alignment anchored at
//! one corner actually needs (small `gap_extend`, or a match score above 1),
//! so passes use it widened to the provable bound of [`anchored_padding`].

use log::warn;

use crate::error::{AlignError, Result};
use crate::kernel::{Borders, GotohKernel};
use crate::model::{Coord, ScoringScheme};
use crate::wavefront::{CellKernel, DiagonalBand, Engine, PassOptions, Scored, TieBreak};

/// Diagonal band for a region with a short and a long side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandSpec {
    /// Deformation bound.
    pub t: i64,
    /// Maximum extent of the alignment along the longer sequence.
    pub m_prime: i64,
    /// Padding.
    pub p: i64,
    pub short_len: usize,
    pub long_len: usize,
    /// `t` exceeded `n` and was clamped.
    pub degenerate: bool,
}

fn ceil_half(x: i64) -> i64 {
    (x + 1).div_euclid(2)
}

/// Band parameters for `score` over a region with sides `len_a` and `len_b`
/// (in either order; the shorter side is `n`).
pub fn compute_band(score: i32, len_a: usize, len_b: usize, scheme: &ScoringScheme) -> BandSpec {
    let (short_len, long_len) = (len_a.min(len_b), len_a.max(len_b));
    let (n, m) = (short_len as i64, long_len as i64);
    let mut t = (score as i64).div_euclid(scheme.max_substitution() as i64);
    let degenerate = t > n;
    if degenerate {
        warn!("band deformation {t} exceeds short length {n}; clamping");
        t = n;
    }
    let m_prime = (n + (n - t).div_euclid(scheme.gap_extend as i64)).min(m);
    let p = ceil_half(2 * n - t - m_prime).max(0);
    BandSpec {
        t,
        m_prime,
        p,
        short_len,
        long_len,
        degenerate,
    }
}

impl BandSpec {
    /// Admissible interval of `long_index - short_index`.
    pub fn admissible(&self) -> (i64, i64) {
        (-self.p, self.p + (self.long_len - self.short_len) as i64)
    }

    /// Same band with padding at least `p`.
    pub fn widened(mut self, p: i64) -> Self {
        self.p = self.p.max(p);
        self
    }

    /// The band as an interval of `j - i` for a pass over `rows x cols` cells,
    /// where `{rows, cols}` are the band's two sides.
    pub fn diagonals(&self, rows: usize, cols: usize) -> DiagonalBand {
        debug_assert_eq!(
            (rows.min(cols), rows.max(cols)),
            (self.short_len, self.long_len)
        );
        padded_diagonals(self.p, rows, cols)
    }
}

/// `j - i` interval covering the corridor between the two corners of a
/// `rows x cols` region plus `p` on either side.
pub(crate) fn padded_diagonals(p: i64, rows: usize, cols: usize) -> DiagonalBand {
    let skew = cols as i64 - rows as i64;
    DiagonalBand {
        lo: skew.min(0) - p,
        hi: skew.max(0) + p,
    }
}

/// Padding that provably contains every alignment anchored at the origin of
/// a `short x long` region with score at least `score`.
///
/// With `D` pair columns and `Gs`, `Gl` gap residues along the short and
/// long side, `score <= ms*D - ge*(Gs+Gl) - open` and `D + Gs <= n`,
/// `D + Gl <= m`, which bounds how far the path can stray on either side.
pub fn anchored_padding(
    score: i32,
    short_len: usize,
    long_len: usize,
    scheme: &ScoringScheme,
) -> i64 {
    let (n, m, s) = (short_len as i64, long_len as i64, score as i64);
    let (ms, ge, go) = (
        scheme.max_substitution() as i64,
        scheme.gap_extend as i64,
        scheme.gap_open as i64,
    );
    let below = (ms * n - s - go).div_euclid(ms + ge).max(0);
    let above = (ms * n - s - go)
        .div_euclid(ge)
        .min((ms * m - s - go).div_euclid(ms + ge))
        .max(0);
    below.max(above - (m - n)).max(0)
}

/// Band used for an anchored search: the formula band, widened when needed.
pub fn anchored_band(score: i32, rows: usize, cols: usize, scheme: &ScoringScheme) -> BandSpec {
    let band = compute_band(score, rows, cols, scheme);
    let safe = anchored_padding(score, band.short_len, band.long_len, scheme);
    if safe > band.p {
        log::debug!("widening band padding {} -> {safe}", band.p);
    }
    band.widened(safe)
}

/// Outcome of an anchored search, in the pass's own coordinates.
#[derive(Debug, Clone)]
pub(crate) struct AnchorHit {
    pub at: Coord,
}

/// Runs an anchored (non-local) pass over `a x b` and returns the cell whose
/// value equals `target`, preferred by `tie`. Border cells are candidates too.
#[allow(clippy::too_many_arguments)]
pub(crate) fn anchored_search(
    engine: &Engine,
    a: &[u8],
    b: &[u8],
    scheme: &ScoringScheme,
    borders: Borders,
    tie: TieBreak,
    target: i32,
    band: Option<DiagonalBand>,
) -> Result<Option<AnchorHit>> {
    let kernel = GotohKernel::new(a, b, scheme, borders, Some(tie));
    let opts = PassOptions {
        band,
        ..PassOptions::default()
    };
    let result = engine.run(&engine.plan(a.len(), b.len()), &kernel, &opts)?;
    let mut hit: Option<Scored> = result.best.filter(|s| s.score == target);
    let mut consider = |score: i32, at: Coord| {
        let cand = Scored { score, at };
        if score == target && hit.is_none_or(|h| tie.prefers(&cand, &h)) {
            hit = Some(cand);
        }
    };
    for j in 0..=b.len() {
        consider(kernel.top_border(j).0, Coord::new(0, j));
    }
    for i in 1..=a.len() {
        consider(kernel.left_border(i).0, Coord::new(i, 0));
    }
    if let Some(best) = result.best {
        if best.score > target {
            return Err(AlignError::ScoreMismatch {
                expected: target,
                found: best.score,
                context: "anchored search exceeded the known optimum",
            });
        }
    }
    Ok(hit.map(|h| AnchorHit { at: h.at }))
}

pub(crate) fn reversed(s: &[u8]) -> Vec<u8> {
    s.iter().rev().copied().collect()
}

/// Finds where the optimal local alignment ending at `end` with `score`
/// starts. Among valid starts the smallest `(i, j)` wins.
pub fn locate_start(
    engine: &Engine,
    a: &[u8],
    b: &[u8],
    scheme: &ScoringScheme,
    end: Coord,
    score: i32,
    band: Option<&BandSpec>,
) -> Result<Coord> {
    if score == 0 {
        return Ok(end);
    }
    let ra = reversed(&a[..end.i]);
    let rb = reversed(&b[..end.j]);
    let diagonals = band.map(|b| b.diagonals(ra.len(), rb.len()));
    let hit = anchored_search(
        engine,
        &ra,
        &rb,
        scheme,
        Borders::Anchored,
        TieBreak::LargestCoord,
        score,
        diagonals,
    )?
    .ok_or(AlignError::StartNotFound { score, end })?;
    Ok(Coord::new(end.i - hit.at.i, end.j - hit.at.j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Alphabet;
    use crate::oracle::{oracle_global, oracle_local, BorderRule};
    use crate::score::best_local;
    use crate::wavefront::EngineConfig;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn engine(dim: usize) -> Engine {
        Engine::new(EngineConfig {
            workers: 2,
            block_rows: dim,
            block_cols: dim,
        })
        .unwrap()
    }

    fn dna(m: i32, x: i32, go: i32, ge: i32) -> ScoringScheme {
        ScoringScheme::match_mismatch(&Alphabet::dna(false), m, x, go, ge).unwrap()
    }

    #[test]
    fn band_examples() {
        let b = compute_band(8, 10, 12, &dna(2, -1, 0, 1));
        assert_eq!((b.t, b.m_prime, b.p), (4, 12, 2));
        assert_eq!(b.admissible(), (-2, 4));
        let b = compute_band(20, 10, 10, &dna(2, -1, 0, 1));
        assert_eq!((b.t, b.m_prime, b.p), (10, 10, 0));
        let b = compute_band(10, 5, 20, &dna(2, -1, 0, 1));
        assert_eq!((b.t, b.m_prime, b.p, b.degenerate), (5, 5, 0, false));
        let b = compute_band(30, 5, 20, &dna(2, -1, 0, 1));
        assert_eq!((b.t, b.degenerate), (5, true));
        // argument order does not matter
        assert_eq!(
            compute_band(8, 12, 10, &dna(2, -1, 0, 1)),
            compute_band(8, 10, 12, &dna(2, -1, 0, 1))
        );
    }

    #[test]
    fn diagonals_follow_orientation() {
        assert_eq!(padded_diagonals(2, 10, 12), DiagonalBand { lo: -2, hi: 4 });
        assert_eq!(padded_diagonals(2, 12, 10), DiagonalBand { lo: -4, hi: 2 });
    }

    /// Three matches, a four-residue gap and three more matches stray four
    /// diagonals from the corner, outside the formula's padding of 3.
    #[test]
    fn formula_padding_alone_can_exclude_an_optimum() {
        let s = dna(2, -10, 0, 1);
        let alpha = Alphabet::dna(false);
        let a = alpha.encode(b"GGGGACGCAT").unwrap();
        let b = alpha.encode(b"ACGTTTTCAT").unwrap();
        let (best, path) = oracle_local(&a, &b, &s).unwrap();
        assert_eq!(
            (best.score, best.end, path.start),
            (8, Coord::new(10, 10), Coord::new(4, 0))
        );
        let literal = compute_band(8, 10, 10, &s);
        assert_eq!(literal.p, 3);
        let widened = anchored_band(8, 10, 10, &s);
        assert!(widened.p >= 4);
        let e = engine(2);
        let found = locate_start(&e, &a, &b, &s, best.end, 8, Some(&widened)).unwrap();
        assert_eq!(found, Coord::new(4, 0));
        // single-cell blocks make the band exact
        let narrow = locate_start(&engine(1), &a, &b, &s, best.end, 8, Some(&literal));
        assert_ne!(narrow.ok(), Some(Coord::new(4, 0)));
    }

    #[test]
    fn simple_starts() {
        let alpha = Alphabet::dna(false);
        let s = dna(1, -3, 5, 2);
        let a = alpha.encode(b"ACGT").unwrap();
        assert_eq!(
            locate_start(&engine(2), &a, &a, &s, Coord::new(4, 4), 4, None).unwrap(),
            Coord::new(0, 0)
        );
        let x = alpha.encode(b"TTACGT").unwrap();
        assert_eq!(
            locate_start(&engine(3), &x, &a, &s, Coord::new(6, 4), 4, None).unwrap(),
            Coord::new(2, 0)
        );
    }

    #[test]
    fn wrong_score_is_reported() {
        let alpha = Alphabet::dna(false);
        let s = dna(1, -3, 5, 2);
        let a = alpha.encode(b"ACGT").unwrap();
        assert!(matches!(
            locate_start(&engine(2), &a, &a, &s, Coord::new(4, 4), 5, None),
            Err(AlignError::StartNotFound { score: 5, .. })
        ));
        assert!(matches!(
            locate_start(&engine(2), &a, &a, &s, Coord::new(4, 4), 3, None),
            Err(AlignError::ScoreMismatch { .. })
        ));
    }

    #[test]
    fn random_starts_delimit_optimal_regions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let e = engine(9);
        for _ in 0..1000 {
            let s = dna(
                rng.gen_range(1..=5),
                rng.gen_range(-5..=-1),
                rng.gen_range(0..=10),
                rng.gen_range(1..=5),
            );
            let a: Vec<u8> = (0..rng.gen_range(1..100))
                .map(|_| rng.gen_range(0..4))
                .collect();
            let mut b: Vec<u8> = (0..rng.gen_range(1..100))
                .map(|_| rng.gen_range(0..4))
                .collect();
            if a.len() > 40 && b.len() > 40 {
                let k = rng.gen_range(5..30);
                b[10..10 + k].copy_from_slice(&a[5..5 + k]);
            }
            let (expected, _) = oracle_local(&a, &b, &s).unwrap();
            let best = best_local(&e, &a, &b, &s, true).unwrap();
            if best.score == 0 {
                continue;
            }
            let band = anchored_band(best.score, best.end.i, best.end.j, &s);
            let plain = locate_start(&e, &a, &b, &s, best.end, best.score, None).unwrap();
            let banded = locate_start(&e, &a, &b, &s, best.end, best.score, Some(&band)).unwrap();
            assert_eq!(plain, banded);
            let (region, _) = oracle_global(
                &a[plain.i..best.end.i],
                &b[plain.j..best.end.j],
                &s,
                BorderRule::MinusInfinity,
            )
            .unwrap()
            .unwrap();
            assert_eq!(region, expected.score);
            assert!(plain.i <= best.end.i && plain.j <= best.end.j);
        }
    }
}
