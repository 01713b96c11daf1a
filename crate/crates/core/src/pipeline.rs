//! End-to-end local alignment: score, locate the start, reconstruct the path.

use log::info;

use crate::error::{AlignError, Result};
use crate::locate::{anchored_band, locate_start};
use crate::model::{AlignmentPath, AlignmentSummary, Coord, ScoringScheme, Sequence};
use crate::reconstruct::{reconstruct, ReconstructConfig, ReconstructStats, DEFAULT_LEAF_LIMIT};
use crate::score::best_local;
use crate::split::{split_align, SplitReport, StageOptions};
use crate::wavefront::{Engine, EngineConfig, PassStats, DEFAULT_BLOCK_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlignerConfig {
    pub workers: usize,
    pub block_rows: usize,
    pub block_cols: usize,
    pub prune: bool,
    pub band: bool,
    pub leaf_limit: usize,
    /// 1 for the single pipeline, 2 for the split scoring stage.
    pub split: usize,
    pub concurrent_leaves: bool,
}

impl Default for AlignerConfig {
    fn default() -> Self {
        Self {
            workers: 1,
            block_rows: DEFAULT_BLOCK_DIM,
            block_cols: DEFAULT_BLOCK_DIM,
            prune: true,
            band: true,
            leaf_limit: DEFAULT_LEAF_LIMIT,
            split: 1,
            concurrent_leaves: true,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    /// Scoring pass statistics; absent when the split stage ran instead.
    pub score_pass: Option<PassStats>,
    pub split: Option<SplitReport>,
    pub reconstruct: ReconstructStats,
}

#[derive(Debug, Clone)]
pub struct Alignment {
    pub summary: AlignmentSummary,
    pub path: AlignmentPath,
    pub report: RunReport,
}

/// Owns the engines and the scoring scheme for a series of alignments.
#[derive(Debug)]
pub struct Aligner {
    config: AlignerConfig,
    scheme: ScoringScheme,
    engines: Vec<Engine>,
}

impl Aligner {
    pub fn new(scheme: ScoringScheme, config: AlignerConfig) -> Result<Self> {
        if config.leaf_limit == 0 {
            return Err(AlignError::InvalidParameter(
                "leaf limit must be positive".into(),
            ));
        }
        let engine = |workers: usize| {
            Engine::new(EngineConfig {
                workers,
                block_rows: config.block_rows,
                block_cols: config.block_cols,
            })
        };
        let engines = match config.split {
            1 => vec![engine(config.workers)?],
            2 => {
                let half = (config.workers / 2).max(1);
                vec![
                    engine(half)?,
                    engine(config.workers.saturating_sub(half).max(1))?,
                ]
            }
            n => return Err(AlignError::UnsupportedSplit(n)),
        };
        Ok(Self {
            config,
            scheme,
            engines,
        })
    }

    pub fn config(&self) -> &AlignerConfig {
        &self.config
    }

    pub fn scheme(&self) -> &ScoringScheme {
        &self.scheme
    }

    fn stage_options(&self) -> StageOptions {
        StageOptions {
            prune: self.config.prune,
            band: self.config.band,
            reconstruct: ReconstructConfig {
                leaf_limit: self.config.leaf_limit,
                band: self.config.band,
                concurrent: self.config.concurrent_leaves,
            },
        }
    }

    /// Aligns two sequences over the scheme's alphabet.
    pub fn align(&self, seq1: &Sequence, seq2: &Sequence) -> Result<Alignment> {
        let a = self.scheme.encode(seq1)?;
        let b = self.scheme.encode(seq2)?;
        self.align_codes(&a, &b)
    }

    /// Aligns already-encoded sequences.
    pub fn align_codes(&self, a: &[u8], b: &[u8]) -> Result<Alignment> {
        if a.is_empty() || b.is_empty() {
            return Ok(Alignment {
                summary: AlignmentSummary::EMPTY,
                path: AlignmentPath::empty(Coord::default()),
                report: RunReport::default(),
            });
        }
        let opts = self.stage_options();
        if self.config.split == 2 {
            let (summary, path, report) = split_align(
                [&self.engines[0], &self.engines[1]],
                a,
                b,
                &self.scheme,
                &opts,
            )?;
            info!(
                "score {} from {} to {} ({:?} case)",
                summary.score, summary.start, summary.end, report.case
            );
            return Ok(Alignment {
                summary,
                path,
                report: RunReport {
                    score_pass: None,
                    reconstruct: report.reconstruct,
                    split: Some(report),
                },
            });
        }

        let engine = &self.engines[0];
        let best = best_local(engine, a, b, &self.scheme, opts.prune)?;
        if best.score == 0 {
            return Ok(Alignment {
                summary: AlignmentSummary::EMPTY,
                path: AlignmentPath::empty(Coord::default()),
                report: RunReport {
                    score_pass: Some(best.stats),
                    ..RunReport::default()
                },
            });
        }
        let band = opts
            .band
            .then(|| anchored_band(best.score, best.end.i, best.end.j, &self.scheme));
        let start = locate_start(
            engine,
            a,
            b,
            &self.scheme,
            best.end,
            best.score,
            band.as_ref(),
        )?;
        let summary = AlignmentSummary {
            score: best.score,
            start,
            end: best.end,
        };
        let (path, stats) = reconstruct(engine, a, b, &self.scheme, &summary, opts.reconstruct)?;
        info!(
            "score {} from {} to {}",
            summary.score, summary.start, summary.end
        );
        Ok(Alignment {
            summary,
            path,
            report: RunReport {
                score_pass: Some(best.stats),
                split: None,
                reconstruct: stats,
            },
        })
    }

    /// Score and end point only; memory stays linear in the sequence lengths.
    pub fn score_only(&self, a: &[u8], b: &[u8]) -> Result<(i32, Coord, PassStats)> {
        let best = best_local(&self.engines[0], a, b, &self.scheme, self.config.prune)?;
        Ok((best.score, best.end, best.stats))
    }
}
