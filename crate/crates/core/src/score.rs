//! Forward local scoring pass with block pruning.

use log::debug;

use crate::error::Result;
use crate::kernel::{Borders, GotohKernel};
use crate::model::{Coord, ScoringScheme};
use crate::wavefront::{Engine, PassOptions, PassStats, TieBreak, WavefrontResult};

/// What a prune decision needs to know.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PruneContext {
    /// Best score found so far; never decreases during a pass.
    pub best_so_far: i32,
    pub max_substitution: i32,
    /// Extent of the matrix any path may still reach, in the pass's coordinates.
    pub rows_limit: usize,
    pub cols_limit: usize,
}

impl PruneContext {
    pub fn new(scheme: &ScoringScheme, rows_limit: usize, cols_limit: usize) -> Self {
        Self {
            best_so_far: 0,
            max_substitution: scheme.max_substitution(),
            rows_limit,
            cols_limit,
        }
    }
}

/// True when no alignment through a block with top-left corner `origin` can
/// reach `ctx.best_so_far`: entering scores are at most `block_input_max`
/// and every remaining column gains at most the maximum substitution score.
pub fn prune_verdict(ctx: &PruneContext, block_input_max: i32, origin: Coord) -> bool {
    let remaining = ctx
        .rows_limit
        .saturating_sub(origin.i)
        .min(ctx.cols_limit.saturating_sub(origin.j)) as i64;
    (block_input_max as i64) + (ctx.max_substitution as i64) * remaining < ctx.best_so_far as i64
}

/// Score and end point of the best local alignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalBest {
    pub score: i32,
    pub end: Coord,
    pub stats: PassStats,
}

impl LocalBest {
    pub(crate) fn from_pass(result: &WavefrontResult) -> Self {
        let (score, end) = match result.best {
            Some(b) if b.score > 0 => (b.score, b.at),
            _ => (0, Coord::default()),
        };
        Self {
            score,
            end,
            stats: result.stats.clone(),
        }
    }
}

/// Local forward pass. Among co-optimal cells the smallest `(i, j)` is the end.
pub fn local_pass(
    engine: &Engine,
    a: &[u8],
    b: &[u8],
    scheme: &ScoringScheme,
    prune: Option<PruneContext>,
) -> Result<WavefrontResult> {
    let kernel = GotohKernel::new(a, b, scheme, Borders::Local, Some(TieBreak::SmallestCoord));
    let opts = PassOptions {
        prune,
        ..PassOptions::default()
    };
    engine.run(&engine.plan(a.len(), b.len()), &kernel, &opts)
}

/// Best local score and its end point over encoded sequences.
pub fn best_local(
    engine: &Engine,
    a: &[u8],
    b: &[u8],
    scheme: &ScoringScheme,
    prune: bool,
) -> Result<LocalBest> {
    let ctx = prune.then(|| PruneContext::new(scheme, a.len(), b.len()));
    let result = local_pass(engine, a, b, scheme, ctx)?;
    let best = LocalBest::from_pass(&result);
    debug!(
        "score pass: {} at {} ({} of {} blocks pruned)",
        best.score, best.end, best.stats.pruned, best.stats.blocks
    );
    Ok(best)
}
