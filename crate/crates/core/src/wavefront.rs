//! Block-wavefront execution of a dynamic-programming matrix.
//!
//! The `len1 x len2` cell matrix is tiled into blocks. Blocks on one block
//! anti-diagonal are independent and run concurrently on a worker pool; a
//! barrier separates successive anti-diagonals. The only state kept between
//! blocks is one boundary segment per block row and per block column, so
//! memory is linear in `len1 + len2`.
//!
//! Every segment includes its corner cell, so a block reads its top-left
//! corner from either input without a third buffer.

use std::panic::{self, AssertUnwindSafe};
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use crate::error::{AlignError, Result};
use crate::model::{Coord, NEG_INF};
use crate::score::{prune_verdict, PruneContext};

pub const DEFAULT_BLOCK_DIM: usize = 512;

/// Worker count and preferred block shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    pub workers: usize,
    pub block_rows: usize,
    pub block_cols: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            workers: 1,
            block_rows: DEFAULT_BLOCK_DIM,
            block_cols: DEFAULT_BLOCK_DIM,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockGrid {
    pub rows: usize,
    pub cols: usize,
    pub block_rows: usize,
    pub block_cols: usize,
    pub grid_rows: usize,
    pub grid_cols: usize,
}

/// Cell range of one block: rows `i0+1..=i1`, columns `j0+1..=j1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSpan {
    pub br: usize,
    pub bc: usize,
    pub i0: usize,
    pub i1: usize,
    pub j0: usize,
    pub j1: usize,
}

impl BlockSpan {
    pub fn rows(&self) -> usize {
        self.i1 - self.i0
    }

    pub fn cols(&self) -> usize {
        self.j1 - self.j0
    }

    pub fn origin(&self) -> Coord {
        Coord::new(self.i0, self.j0)
    }
}

/// Tiles a `len1 x len2` matrix. Block dimensions are clamped to the
/// sequence lengths; the last block row and column may be ragged.
pub fn plan_grid(len1: usize, len2: usize, block_rows: usize, block_cols: usize) -> BlockGrid {
    let block_rows = block_rows.max(1).min(len1.max(1));
    let block_cols = block_cols.max(1).min(len2.max(1));
    BlockGrid {
        rows: len1,
        cols: len2,
        block_rows,
        block_cols,
        grid_rows: len1.div_ceil(block_rows),
        grid_cols: len2.div_ceil(block_cols),
    }
}

impl BlockGrid {
    pub fn anti_diagonals(&self) -> usize {
        if self.blocks() == 0 {
            return 0;
        }
        self.grid_rows + self.grid_cols - 1
    }

    pub fn blocks(&self) -> usize {
        self.grid_rows * self.grid_cols
    }

    pub fn span(&self, br: usize, bc: usize) -> BlockSpan {
        let i0 = br * self.block_rows;
        let j0 = bc * self.block_cols;
        BlockSpan {
            br,
            bc,
            i0,
            i1: (i0 + self.block_rows).min(self.rows),
            j0,
            j1: (j0 + self.block_cols).min(self.cols),
        }
    }

    /// Blocks on block anti-diagonal `d`, in increasing block-row order.
    pub fn diagonal(&self, d: usize) -> impl Iterator<Item = BlockSpan> + '_ {
        let lo = d.saturating_sub(self.grid_cols - 1);
        let hi = d.min(self.grid_rows - 1);
        (lo..=hi).map(move |br| self.span(br, d - br))
    }
}

/// Admissible diagonals `lo <= j - i <= hi` in the pass's own coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagonalBand {
    pub lo: i64,
    pub hi: i64,
}

impl DiagonalBand {
    pub fn contains(&self, i: usize, j: usize) -> bool {
        let d = j as i64 - i as i64;
        self.lo <= d && d <= self.hi
    }

    /// Whether any cell of the block lies on an admissible diagonal.
    pub fn touches(&self, span: &BlockSpan) -> bool {
        let min_d = span.j0 as i64 + 1 - span.i1 as i64;
        let max_d = span.j1 as i64 - (span.i0 as i64 + 1);
        min_d <= self.hi && max_d >= self.lo
    }
}

/// One boundary segment: `h` scores plus the gap state crossing the edge
/// (vertical-gap scores on a row edge, horizontal-gap scores on a column edge).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Edge {
    pub h: Vec<i32>,
    pub g: Vec<i32>,
}

impl Edge {
    fn with_len(len: usize) -> Self {
        Self {
            h: Vec::with_capacity(len),
            g: Vec::with_capacity(len),
        }
    }

    fn push(&mut self, (h, g): (i32, i32)) {
        self.h.push(h);
        self.g.push(g);
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }
}

/// A score at a matrix cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scored {
    pub score: i32,
    pub at: Coord,
}

/// Which cell wins among equal scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    SmallestCoord,
    LargestCoord,
}

impl TieBreak {
    /// Is `new` strictly preferred over `old`?
    #[inline]
    pub fn prefers(self, new: &Scored, old: &Scored) -> bool {
        new.score > old.score
            || (new.score == old.score
                && match self {
                    TieBreak::SmallestCoord => new.at < old.at,
                    TieBreak::LargestCoord => new.at > old.at,
                })
    }
}

/// A pure per-block computation.
///
/// On entry `top` holds row `i0` over columns `j0..=j1` and `left` holds
/// column `j0` over rows `i0..=i1`. On return they must hold row `i1` and
/// column `j1` over the same index ranges. Kernels read nothing else.
pub trait CellKernel: Sync {
    /// `(H, F)` at `(0, j)`.
    fn top_border(&self, j: usize) -> (i32, i32);
    /// `(H, E)` at `(i, 0)`.
    fn left_border(&self, i: usize) -> (i32, i32);
    /// `H` written over the outputs of a skipped block.
    fn skip_fill(&self) -> i32;
    fn tie_break(&self) -> TieBreak {
        TieBreak::SmallestCoord
    }
    /// Computes the block and returns its best cell, if the kernel tracks one.
    fn solve(&self, span: &BlockSpan, top: &mut Edge, left: &mut Edge) -> Option<Scored>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Run,
    Pruned,
    OutOfBand,
}

#[derive(Debug, Clone, Default)]
pub struct PassOptions {
    pub band: Option<DiagonalBand>,
    pub prune: Option<PruneContext>,
    pub record_events: bool,
}

/// Start/finish sequence numbers of one block, from a single global counter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockEvent {
    pub br: usize,
    pub bc: usize,
    pub diagonal: usize,
    pub verdict: Verdict,
    pub started: u64,
    pub finished: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PassStats {
    pub blocks: usize,
    pub executed: usize,
    pub pruned: usize,
    pub banded: usize,
    pub cells: u64,
    /// Cells held in boundary segments, the engine's whole inter-block state.
    pub boundary_cells: usize,
    /// Largest best-so-far any prune decision saw.
    pub max_observed_best: Option<i32>,
}

#[derive(Debug, Clone)]
pub struct WavefrontResult {
    pub best: Option<Scored>,
    /// Row `len1` over columns `0..=len2`.
    pub last_row: Edge,
    /// Column `len2` over rows `0..=len1`.
    pub last_col: Edge,
    pub stats: PassStats,
    pub events: Vec<BlockEvent>,
}

struct WorkItem {
    span: BlockSpan,
    top: Edge,
    left: Edge,
    verdict: Verdict,
    best: Option<Scored>,
    started: u64,
    finished: u64,
}

/// A worker pool that runs wavefront passes.
pub struct Engine {
    config: EngineConfig,
    pool: ThreadPool,
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine")
            .field("config", &self.config)
            .finish()
    }
}

impl Engine {
    pub fn new(config: EngineConfig) -> Result<Self> {
        if config.workers == 0 || config.block_rows == 0 || config.block_cols == 0 {
            return Err(AlignError::InvalidParameter(
                "workers and block dimensions must be positive".into(),
            ));
        }
        let pool = ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .thread_name(|k| format!("wavefront-{k}"))
            .build()
            .map_err(|e| AlignError::InvalidParameter(e.to_string()))?;
        Ok(Self { config, pool })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn plan(&self, len1: usize, len2: usize) -> BlockGrid {
        plan_grid(len1, len2, self.config.block_rows, self.config.block_cols)
    }

    /// Runs `f` on this engine's pool.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.pool.install(f)
    }

    /// Runs one full pass over `grid`.
    pub fn run<K: CellKernel>(
        &self,
        grid: &BlockGrid,
        kernel: &K,
        opts: &PassOptions,
    ) -> Result<WavefrontResult> {
        panic::catch_unwind(AssertUnwindSafe(|| self.run_inner(grid, kernel, opts))).map_err(
            |payload| {
                let msg = payload
                    .downcast_ref::<&str>()
                    .map(|s| s.to_string())
                    .or_else(|| payload.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "unknown panic".into());
                AlignError::WorkerPanic(msg)
            },
        )
    }

    fn run_inner<K: CellKernel>(
        &self,
        grid: &BlockGrid,
        kernel: &K,
        opts: &PassOptions,
    ) -> WavefrontResult {
        let mut row_segs: Vec<Edge> = (0..grid.grid_cols)
            .map(|bc| {
                let s = grid.span(0, bc);
                let mut e = Edge::with_len(s.cols() + 1);
                (s.j0..=s.j1).for_each(|j| e.push(kernel.top_border(j)));
                e
            })
            .collect();
        let mut col_segs: Vec<Edge> = (0..grid.grid_rows)
            .map(|br| {
                let s = grid.span(br, 0);
                let mut e = Edge::with_len(s.rows() + 1);
                (s.i0..=s.i1).for_each(|i| e.push(kernel.left_border(i)));
                e
            })
            .collect();

        let mut stats = PassStats {
            blocks: grid.blocks(),
            boundary_cells: 2
                * (row_segs.iter().map(Edge::len).sum::<usize>()
                    + col_segs.iter().map(Edge::len).sum::<usize>()),
            ..PassStats::default()
        };
        let tie = kernel.tie_break();
        let mut best: Option<Scored> = None;
        let mut prune = opts.prune;
        let clock = AtomicU64::new(0);
        let mut events = Vec::new();
        let mut items: Vec<WorkItem> = Vec::new();

        for d in 0..grid.anti_diagonals() {
            items.clear();
            for span in grid.diagonal(d) {
                let top = std::mem::take(&mut row_segs[span.bc]);
                let left = std::mem::take(&mut col_segs[span.br]);
                let verdict = if opts.band.is_some_and(|b| !b.touches(&span)) {
                    Verdict::OutOfBand
                } else if let Some(ctx) = &prune {
                    let input_max = top
                        .h
                        .iter()
                        .chain(&left.h)
                        .copied()
                        .max()
                        .unwrap_or(0)
                        .max(0);
                    stats.max_observed_best = stats.max_observed_best.max(Some(ctx.best_so_far));
                    if prune_verdict(ctx, input_max, span.origin()) {
                        Verdict::Pruned
                    } else {
                        Verdict::Run
                    }
                } else {
                    Verdict::Run
                };
                items.push(WorkItem {
                    span,
                    top,
                    left,
                    verdict,
                    best: None,
                    started: 0,
                    finished: 0,
                });
            }

            let process = |w: &mut WorkItem| {
                w.started = clock.fetch_add(1, Ordering::SeqCst);
                match w.verdict {
                    Verdict::Run => w.best = kernel.solve(&w.span, &mut w.top, &mut w.left),
                    Verdict::Pruned | Verdict::OutOfBand => {
                        skip(kernel.skip_fill(), &mut w.top, &mut w.left)
                    }
                }
                w.finished = clock.fetch_add(1, Ordering::SeqCst);
            };
            if items.len() == 1 || self.config.workers == 1 {
                items.iter_mut().for_each(process);
            } else {
                self.pool.install(|| items.par_iter_mut().for_each(process));
            }

            for w in items.drain(..) {
                match w.verdict {
                    Verdict::Run => {
                        stats.executed += 1;
                        stats.cells += (w.span.rows() * w.span.cols()) as u64;
                    }
                    Verdict::Pruned => stats.pruned += 1,
                    Verdict::OutOfBand => stats.banded += 1,
                }
                if let Some(b) = w.best {
                    if best.is_none_or(|cur| tie.prefers(&b, &cur)) {
                        best = Some(b);
                    }
                    if let Some(ctx) = prune.as_mut() {
                        ctx.best_so_far = ctx.best_so_far.max(b.score);
                    }
                }
                if opts.record_events {
                    events.push(BlockEvent {
                        br: w.span.br,
                        bc: w.span.bc,
                        diagonal: d,
                        verdict: w.verdict,
                        started: w.started,
                        finished: w.finished,
                    });
                }
                row_segs[w.span.bc] = w.top;
                col_segs[w.span.br] = w.left;
            }
        }

        let last_row = if grid.blocks() == 0 {
            let mut e = Edge::with_len(grid.cols + 1);
            (0..=grid.cols).for_each(|j| {
                e.push(if grid.rows == 0 {
                    kernel.top_border(j)
                } else {
                    (NEG_INF, NEG_INF)
                })
            });
            if grid.rows > 0 {
                e.h[0] = kernel.left_border(grid.rows).0;
            }
            e
        } else {
            stitch(&row_segs, grid.cols + 1, |bc| grid.span(0, bc).j0)
        };
        let last_col = if grid.blocks() == 0 {
            let mut e = Edge::with_len(grid.rows + 1);
            (0..=grid.rows).for_each(|i| {
                e.push(if grid.cols == 0 {
                    kernel.left_border(i)
                } else {
                    (NEG_INF, NEG_INF)
                })
            });
            if grid.cols > 0 {
                e.h[0] = kernel.top_border(grid.cols).0;
            }
            e
        } else {
            stitch(&col_segs, grid.rows + 1, |br| grid.span(br, 0).i0)
        };

        WavefrontResult {
            best,
            last_row,
            last_col,
            stats,
            events,
        }
    }
}

fn skip(fill: i32, top: &mut Edge, left: &mut Edge) {
    let bottom_left = *left.h.last().expect("non-empty edge");
    let top_right = *top.h.last().expect("non-empty edge");
    top.h.fill(fill);
    top.g.fill(NEG_INF);
    left.h.fill(fill);
    left.g.fill(NEG_INF);
    top.h[0] = bottom_left;
    left.h[0] = top_right;
}

fn stitch(segs: &[Edge], len: usize, offset: impl Fn(usize) -> usize) -> Edge {
    let mut out = Edge {
        h: vec![NEG_INF; len],
        g: vec![NEG_INF; len],
    };
    // Neighboring segments share a corner; the earlier one carries its gap value.
    for (k, seg) in segs.iter().enumerate().rev() {
        let o = offset(k);
        out.h[o..o + seg.len()].copy_from_slice(&seg.h);
        out.g[o..o + seg.len()].copy_from_slice(&seg.g);
    }
    out
}
