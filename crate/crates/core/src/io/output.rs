//! Text renderings of an alignment.

use std::fmt::Write;

use crate::model::{path_to_cigar, AlignmentPath, AlignmentSummary, Op, Sequence};

/// Columns per block in the pairwise view.
pub const PAIR_WIDTH: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum OutputFormat {
    /// Score and 1-based inclusive ranges.
    #[default]
    Stat,
    /// 0-based start coordinates and an extended CIGAR string.
    Cigar,
    /// Blocks of target, match and query lines.
    Pair,
}

/// Renders `summary` and `path` for `target` (first sequence) against `query`.
///
/// An empty alignment has CIGAR `*` and no pair blocks.
pub fn write_output(
    summary: &AlignmentSummary,
    path: &AlignmentPath,
    format: OutputFormat,
    target: &Sequence,
    query: &Sequence,
) -> String {
    match format {
        OutputFormat::Stat => format!(
            "score: {}\ntarget: {}..{} {}\nquery: {}..{} {}\n",
            summary.score,
            summary.start.i + 1,
            summary.end.i,
            target.id,
            summary.start.j + 1,
            summary.end.j,
            query.id
        ),
        OutputFormat::Cigar => {
            let cigar = if path.is_empty() {
                "*".to_string()
            } else {
                path_to_cigar(&path.ops)
            };
            format!("{} {} {}\n", path.start.i, path.start.j, cigar)
        }
        OutputFormat::Pair => pair(path, target.residues(), query.residues()),
    }
}

fn pair(path: &AlignmentPath, t: &[u8], q: &[u8]) -> String {
    let end = path.end();
    let width = (end.i.max(end.j) + 1).to_string().len();
    let (mut i, mut j) = (path.start.i, path.start.j);
    let mut out = String::new();
    for (block, ops) in path.ops.chunks(PAIR_WIDTH).enumerate() {
        let (mut top, mut mid, mut bottom) = (String::new(), String::new(), String::new());
        let (i0, j0) = (i, j);
        for &op in ops {
            let (tc, mc, qc) = match op {
                Op::Match => (t[i], '|', q[j]),
                Op::Mismatch => (t[i], '.', q[j]),
                Op::Insert => (b'-', ' ', q[j]),
                Op::Delete => (t[i], ' ', b'-'),
            };
            top.push(tc as char);
            mid.push(mc);
            bottom.push(qc as char);
            let (di, dj) = op.step();
            i += di;
            j += dj;
        }
        if block > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "target {:>width$} {top} {i}", i0 + 1);
        let _ = writeln!(out, "       {:>width$} {mid}", "");
        let _ = writeln!(out, "query  {:>width$} {bottom} {j}", j0 + 1);
    }
    out
}
