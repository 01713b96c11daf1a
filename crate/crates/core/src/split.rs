//! Two-way split of the scoring stage.
//!
//! The first sequence is cut at its middle row. One engine runs a forward
//! local pass over the top half while a second engine runs a reverse local
//! pass over the bottom half. The best alignment then lies in the top half,
//! in the bottom half, or crosses the middle row; the last case is found by
//! combining the two middle rows.

use log::debug;

use crate::error::{AlignError, Result};
use crate::kernel::{Borders, GapState};
use crate::locate::{anchored_band, anchored_search, locate_start, reversed};
use crate::model::{score_of_path, AlignmentPath, AlignmentSummary, Coord, ScoringScheme};
use crate::reconstruct::{
    combine_rows, join_paths, reconstruct, solve_subproblem, ReconstructConfig, ReconstructStats,
    Subproblem,
};
use crate::score::{local_pass, PruneContext};
use crate::wavefront::{Edge, Engine, PassStats, TieBreak, WavefrontResult};

/// Where the best alignment was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MidCase {
    Upper,
    Midpoint,
    Lower,
}

/// Result of one half pass.
#[derive(Debug, Clone)]
pub struct HalfResult {
    pub score: i32,
    /// End point in the pass's own orientation.
    pub end: Coord,
    /// Middle row, indexed by forward column.
    pub row: Edge,
    pub stats: PassStats,
}

#[derive(Debug, Clone)]
pub struct MidCombine {
    pub upper: HalfResult,
    pub lower: HalfResult,
    pub mid_score: i32,
    pub mid: Coord,
    pub gap_join: bool,
}

/// Argmax of the three scores; ties prefer upper, then midpoint.
pub fn classify(upper: i32, lower: i32, mid: i32) -> MidCase {
    if upper >= mid && upper >= lower {
        MidCase::Upper
    } else if mid >= lower {
        MidCase::Midpoint
    } else {
        MidCase::Lower
    }
}

pub fn classify_midcase(mc: &MidCombine) -> MidCase {
    classify(mc.upper.score, mc.lower.score, mc.mid_score)
}

/// What the split run did, for inspection by callers and tests.
#[derive(Debug, Clone)]
pub struct SplitReport {
    pub case: MidCase,
    pub split_row: usize,
    pub upper_score: i32,
    pub lower_score: i32,
    pub mid_score: i32,
    pub mid: Coord,
    pub gap_join: bool,
    /// Forward rows covered by each scoring pass.
    pub upper_rows: (usize, usize),
    pub lower_rows: (usize, usize),
    pub upper_stats: PassStats,
    pub lower_stats: PassStats,
    pub reconstruct: ReconstructStats,
}

/// Options shared with the single pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageOptions {
    pub prune: bool,
    pub band: bool,
    pub reconstruct: ReconstructConfig,
}

fn half_result(pass: WavefrontResult, row: Edge) -> HalfResult {
    let (score, end) = match pass.best {
        Some(b) if b.score > 0 => (b.score, b.at),
        _ => (0, Coord::default()),
    };
    HalfResult {
        score,
        end,
        row,
        stats: pass.stats,
    }
}

/// Runs both half passes concurrently, one per engine, and combines them.
pub fn score_halves(
    engines: [&Engine; 2],
    a: &[u8],
    b: &[u8],
    scheme: &ScoringScheme,
    prune: bool,
) -> Result<MidCombine> {
    let mid = a.len() / 2;
    let ctx = prune.then(|| PruneContext::new(scheme, a.len(), b.len()));
    let top = &a[..mid];
    let rev_bottom = reversed(&a[mid..]);
    let rev_b = reversed(b);
    let (up, down) = std::thread::scope(|scope| {
        let lower = scope.spawn(|| local_pass(engines[1], &rev_bottom, &rev_b, scheme, ctx));
        let upper = local_pass(engines[0], top, b, scheme, ctx);
        (
            upper,
            lower
                .join()
                .unwrap_or_else(|_| Err(AlignError::WorkerPanic("lower half".into()))),
        )
    });
    let (up, down) = (up?, down?);

    let up_row = up.last_row.clone();
    let down_row = Edge {
        h: down.last_row.h.iter().rev().copied().collect(),
        g: down.last_row.g.iter().rev().copied().collect(),
    };
    let (j, combined, gap_join) = combine_rows(
        &up_row.h,
        &up_row.g,
        &down_row.h,
        &down_row.g,
        scheme.gap_open,
    )
    .expect("middle row is never empty");
    Ok(MidCombine {
        upper: half_result(up, up_row),
        lower: half_result(down, down_row),
        mid_score: combined.clamp(0, i32::MAX as i64) as i32,
        mid: Coord::new(mid, j),
        gap_join,
    })
}

/// Start and end of the best alignment from a half pass, then its path.
fn finish_upper(
    engine: &Engine,
    a: &[u8],
    b: &[u8],
    scheme: &ScoringScheme,
    half: &HalfResult,
    opts: &StageOptions,
) -> Result<(AlignmentSummary, AlignmentPath, ReconstructStats)> {
    let band = opts
        .band
        .then(|| anchored_band(half.score, half.end.i, half.end.j, scheme));
    let start = locate_start(engine, a, b, scheme, half.end, half.score, band.as_ref())?;
    let summary = AlignmentSummary {
        score: half.score,
        start,
        end: half.end,
    };
    let (path, stats) = reconstruct(engine, a, b, scheme, &summary, opts.reconstruct)?;
    Ok((summary, path, stats))
}

fn finish_lower(
    engine: &Engine,
    a: &[u8],
    b: &[u8],
    scheme: &ScoringScheme,
    half: &HalfResult,
    split_row: usize,
    opts: &StageOptions,
) -> Result<(AlignmentSummary, AlignmentPath, ReconstructStats)> {
    let start = Coord::new(a.len() - half.end.i, b.len() - half.end.j);
    debug_assert!(start.i >= split_row);
    let (ra, rb) = (&a[start.i..], &b[start.j..]);
    let band = (opts.band).then(|| {
        anchored_band(half.score, ra.len(), rb.len(), scheme).diagonals(ra.len(), rb.len())
    });
    let hit = anchored_search(
        engine,
        ra,
        rb,
        scheme,
        Borders::Anchored,
        TieBreak::SmallestCoord,
        half.score,
        band,
    )?
    .ok_or(AlignError::StartNotFound {
        score: half.score,
        end: start,
    })?;
    let summary = AlignmentSummary {
        score: half.score,
        start,
        end: Coord::new(start.i + hit.at.i, start.j + hit.at.j),
    };
    let (path, stats) = reconstruct(engine, a, b, scheme, &summary, opts.reconstruct)?;
    Ok((summary, path, stats))
}

fn finish_midpoint(
    engine: &Engine,
    a: &[u8],
    b: &[u8],
    scheme: &ScoringScheme,
    mc: &MidCombine,
    opts: &StageOptions,
) -> Result<(AlignmentSummary, AlignmentPath, ReconstructStats)> {
    let m = mc.mid;
    let (state, up_target, down_target) = if mc.gap_join {
        (GapState::Delete, mc.upper.row.g[m.j], mc.lower.row.g[m.j])
    } else {
        (GapState::Free, mc.upper.row.h[m.j], mc.lower.row.h[m.j])
    };
    let band_for = |target: i32, rows: usize, cols: usize| {
        (opts.band && target > 0)
            .then(|| anchored_band(target, rows, cols, scheme).diagonals(rows, cols))
    };
    let search = |sa: &[u8], sb: &[u8], tie: TieBreak, target: i32| -> Result<Coord> {
        if target == 0 && !mc.gap_join {
            return Ok(Coord::default());
        }
        anchored_search(
            engine,
            sa,
            sb,
            scheme,
            Borders::Global(state),
            tie,
            target,
            band_for(target, sa.len(), sb.len()),
        )?
        .map(|h| h.at)
        .ok_or(AlignError::StartNotFound {
            score: target,
            end: m,
        })
    };

    let (ua, ub) = (reversed(&a[..m.i]), reversed(&b[..m.j]));
    let back = search(&ua, &ub, TieBreak::LargestCoord, up_target)?;
    let start = Coord::new(m.i - back.i, m.j - back.j);
    let fwd = search(&a[m.i..], &b[m.j..], TieBreak::SmallestCoord, down_target)?;
    let end = Coord::new(m.i + fwd.i, m.j + fwd.j);

    let upper = Subproblem {
        i0: start.i,
        i1: m.i,
        j0: start.j,
        j1: m.j,
        start: GapState::Free,
        end: state,
        expected: up_target,
    };
    let lower = Subproblem {
        i0: m.i,
        i1: end.i,
        j0: m.j,
        j1: end.j,
        start: state,
        end: GapState::Free,
        expected: down_target,
    };
    let (up_path, s1) = solve_subproblem(engine, a, b, scheme, upper, opts.reconstruct)?;
    let (down_path, s2) = solve_subproblem(engine, a, b, scheme, lower, opts.reconstruct)?;
    let path = join_paths(vec![up_path, down_path])?;
    let summary = AlignmentSummary {
        score: mc.mid_score,
        start,
        end,
    };
    let found = score_of_path(&path, a, b, scheme)?;
    if found != summary.score {
        return Err(AlignError::ScoreMismatch {
            expected: summary.score,
            found,
            context: "joined halves",
        });
    }
    let stats = ReconstructStats {
        splits: s1.splits + s2.splits,
        leaves: s1.leaves + s2.leaves,
        max_depth: s1.max_depth.max(s2.max_depth),
        split_cells: s1.split_cells + s2.split_cells,
        leaf_cells: s1.leaf_cells + s2.leaf_cells,
        largest_leaf: s1.largest_leaf.max(s2.largest_leaf),
    };
    Ok((summary, path, stats))
}

/// Best local alignment computed with the first sequence split in two.
pub fn split_align(
    engines: [&Engine; 2],
    a: &[u8],
    b: &[u8],
    scheme: &ScoringScheme,
    opts: &StageOptions,
) -> Result<(AlignmentSummary, AlignmentPath, SplitReport)> {
    let mc = score_halves(engines, a, b, scheme, opts.prune)?;
    let case = classify_midcase(&mc);
    debug!(
        "split at row {}: upper {}, lower {}, midpoint {} -> {case:?}",
        mc.mid.i, mc.upper.score, mc.lower.score, mc.mid_score
    );
    let engine = engines[0];
    let best = mc.upper.score.max(mc.lower.score).max(mc.mid_score);
    let (summary, path, stats) = if best == 0 {
        (
            AlignmentSummary::EMPTY,
            AlignmentPath::empty(Coord::default()),
            ReconstructStats::default(),
        )
    } else {
        match case {
            MidCase::Upper => finish_upper(engine, a, b, scheme, &mc.upper, opts)?,
            MidCase::Lower => finish_lower(engine, a, b, scheme, &mc.lower, mc.mid.i, opts)?,
            MidCase::Midpoint => finish_midpoint(engine, a, b, scheme, &mc, opts)?,
        }
    };
    let report = SplitReport {
        case,
        split_row: mc.mid.i,
        upper_score: mc.upper.score,
        lower_score: mc.lower.score,
        mid_score: mc.mid_score,
        mid: mc.mid,
        gap_join: mc.gap_join,
        upper_rows: (0, mc.mid.i),
        lower_rows: (mc.mid.i, a.len()),
        upper_stats: mc.upper.stats,
        lower_stats: mc.lower.stats,
        reconstruct: stats,
    };
    Ok((summary, path, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Alphabet;
    use crate::oracle::{oracle_local, rescore};
    use crate::wavefront::EngineConfig;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn engine(dim: usize) -> Engine {
        Engine::new(EngineConfig {
            workers: 1,
            block_rows: dim,
            block_cols: dim,
        })
        .unwrap()
    }

    fn opts(prune: bool, band: bool) -> StageOptions {
        StageOptions {
            prune,
            band,
            reconstruct: ReconstructConfig {
                leaf_limit: 64,
                band,
                concurrent: false,
            },
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(10, 3, 7), MidCase::Upper);
        assert_eq!(classify(5, 5, 5), MidCase::Upper);
        assert_eq!(classify(2, 3, 9), MidCase::Midpoint);
        assert_eq!(classify(2, 9, 9), MidCase::Midpoint);
        assert_eq!(classify(2, 9, 3), MidCase::Lower);
    }

    #[test]
    fn random_splits_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let (e1, e2) = (engine(8), engine(5));
        let mut seen = std::collections::HashSet::new();
        for round in 0..400 {
            let s = ScoringScheme::match_mismatch(
                &Alphabet::dna(false),
                rng.gen_range(1..=5),
                rng.gen_range(-5..=-1),
                rng.gen_range(0..=10),
                rng.gen_range(1..=5),
            )
            .unwrap();
            let n = rng.gen_range(1..=150);
            let m = rng.gen_range(1..=150);
            let a: Vec<u8> = (0..n).map(|_| rng.gen_range(0..4)).collect();
            let mut b: Vec<u8> = (0..m).map(|_| rng.gen_range(0..4)).collect();
            if n > 40 && m > 40 {
                let at = rng.gen_range(0..n - 30);
                let k = rng.gen_range(5..30);
                let bt = rng.gen_range(0..m - k);
                b[bt..bt + k].copy_from_slice(&a[at..at + k]);
            }
            let (expected, _) = oracle_local(&a, &b, &s).unwrap();
            let o = opts(round % 2 == 0, round % 3 != 0);
            let (summary, path, report) = split_align([&e1, &e2], &a, &b, &s, &o).unwrap();
            assert_eq!(summary.score, expected.score, "round {round}");
            assert_eq!(rescore(&path, &a, &b, &s), expected.score as i64);
            if summary.score > 0 {
                assert_eq!((path.start, path.end()), (summary.start, summary.end));
                seen.insert(report.case);
            }
            if !o.prune {
                assert_eq!(
                    report.upper_stats.cells + report.lower_stats.cells,
                    (n * m) as u64,
                    "halves overlap or miss cells"
                );
            }
        }
        assert_eq!(seen.len(), 3, "cases seen: {seen:?}");
    }
}
