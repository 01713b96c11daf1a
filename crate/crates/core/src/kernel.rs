//! Gotoh affine-gap block kernel shared by every pass.
//!
//! Recurrences, with `oe = gap_open + gap_extend`:
//!
//! ```text
//! E(i,j) = max(H(i,j-1) - oe, E(i,j-1) - gap_extend)   // gap in the first sequence's row: Insert
//! F(i,j) = max(H(i-1,j) - oe, F(i-1,j) - gap_extend)   // Delete
//! H(i,j) = max(H(i-1,j-1) + sub(a_i, b_j), E(i,j), F(i,j), floor)
//! ```
//!
//! `floor` is 0 for local alignment and [`NEG_INF`] otherwise, which also
//! stops minus-infinity values from drifting towards overflow.

use crate::model::{Coord, ScoringScheme, NEG_INF};
use crate::wavefront::{BlockSpan, CellKernel, Edge, Scored, TieBreak};

/// State the alignment is in where it meets a subproblem boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GapState {
    /// No constraint.
    Free,
    /// The boundary op must be a `Delete` (the run continues in the neighbor).
    Delete,
}

/// Border initialization of a pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Borders {
    /// Smith-Waterman: every border cell is 0 and scores never drop below 0.
    Local,
    /// Origin 0, every other border minus infinity, no zero floor: the
    /// alignment is anchored at the origin and its first column is a pair.
    Anchored,
    /// Needleman-Wunsch with affine leading gaps; `Delete` forces the first op.
    Global(GapState),
}

/// Columns solved together by the vectorized sweep.
const LANES: usize = 16;
/// Largest alphabet the vectorized sweep handles.
const PROFILE_ROWS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Simd {
    Portable,
    #[cfg(target_arch = "x86_64")]
    Avx2,
    #[cfg(target_arch = "x86_64")]
    Avx512,
}

fn detect_simd() -> Simd {
    #[cfg(target_arch = "x86_64")]
    {
        if std::env::var_os("BLOCKALIGN_PORTABLE").is_none() {
            if is_x86_feature_detected!("avx512f")
                && is_x86_feature_detected!("avx512bw")
                && is_x86_feature_detected!("avx512vl")
            {
                return Simd::Avx512;
            }
            if is_x86_feature_detected!("avx2") {
                return Simd::Avx2;
            }
        }
    }
    Simd::Portable
}

/// `[first, v[0], .., v[LANES - 2]]`
#[inline(always)]
fn shift_in(first: i32, v: &[i32; LANES]) -> [i32; LANES] {
    std::array::from_fn(|c| if c == 0 { first } else { v[c - 1] })
}

const SUB_TABLE: u8 = 0;
const SUB_EQ: u8 = 1;
const SUB_EQ_WILD: u8 = 2;

/// A table that is one score on the diagonal and another elsewhere, except
/// for an optional wildcard code scoring 0 against everything.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Uniform {
    same: i32,
    differ: i32,
    wildcard: Option<u8>,
}

fn uniform_scores(table: &[i32], k: usize) -> Option<Uniform> {
    let fits = |wildcard: Option<u8>| -> Option<Uniform> {
        let plain = (0..k as u8).find(|&x| Some(x) != wildcard)?;
        let same = table[plain as usize * k + plain as usize];
        let differ = (0..k as u8)
            .find(|&x| x != plain && Some(x) != wildcard)
            .map(|x| table[plain as usize * k + x as usize]);
        let differ = differ.unwrap_or(0);
        let ok = (0..k).all(|b| {
            (0..k).all(|a| {
                let want = if wildcard.is_some_and(|w| w as usize == a || w as usize == b) {
                    0
                } else if a == b {
                    same
                } else {
                    differ
                };
                table[b * k + a] == want
            })
        });
        ok.then_some(Uniform {
            same,
            differ,
            wildcard,
        })
    };
    fits(None).or_else(|| (0..k as u8).find_map(|w| fits(Some(w))))
}

pub struct GotohKernel<'a> {
    a: &'a [u8],
    b: &'a [u8],
    scheme: &'a ScoringScheme,
    borders: Borders,
    track: Option<TieBreak>,
    simd: Simd,
    uniform: Option<Uniform>,
}

fn clamp(v: i64) -> i32 {
    v.max(NEG_INF as i64) as i32
}

impl<'a> GotohKernel<'a> {
    pub fn new(
        a: &'a [u8],
        b: &'a [u8],
        scheme: &'a ScoringScheme,
        borders: Borders,
        track: Option<TieBreak>,
    ) -> Self {
        Self {
            a,
            b,
            scheme,
            borders,
            track,
            simd: detect_simd(),
            uniform: {
                let (table, k) = scheme.table();
                uniform_scores(table, k)
            },
        }
    }

    fn gap(&self, len: usize) -> i32 {
        clamp(-(self.scheme.gap_cost(len)))
    }

    fn floor(&self) -> i32 {
        match self.borders {
            Borders::Local => 0,
            _ => NEG_INF,
        }
    }

    fn solve_tracked<const TRACK: u8>(
        &self,
        span: &BlockSpan,
        top: &mut Edge,
        left: &mut Edge,
    ) -> Option<Scored> {
        let rows = span.rows();
        let corner_out = left.h[rows];
        let mut best: Option<Scored> = None;
        let (_, k) = self.scheme.table();
        let strips = if rows > 0 && k <= PROFILE_ROWS {
            span.cols() / LANES
        } else {
            0
        };
        if strips > 0 {
            let a = &self.a[span.i0..span.i1];
            // reversed and padded so each anti-diagonal reads a contiguous window
            let mut rpad = vec![0u8; rows + 2 * LANES];
            for (x, &c) in a.iter().rev().enumerate() {
                rpad[LANES + x] = c;
            }
            for strip in 0..strips {
                let first = strip * LANES;
                let found = match self.uniform {
                    Some(Uniform { wildcard: None, .. }) => {
                        self.strip_dispatch::<TRACK, SUB_EQ>(span, first, &rpad, top, left)
                    }
                    Some(_) => {
                        self.strip_dispatch::<TRACK, SUB_EQ_WILD>(span, first, &rpad, top, left)
                    }
                    None => self.strip_dispatch::<TRACK, SUB_TABLE>(span, first, &rpad, top, left),
                };
                best = self.fold(best, found);
            }
        }
        let scalar = self.scalar_columns::<TRACK>(span, strips * LANES, top, left);
        best = self.fold(best, scalar);
        top.h[0] = corner_out;
        top.g[0] = NEG_INF;
        best
    }

    fn fold(&self, best: Option<Scored>, cand: Option<Scored>) -> Option<Scored> {
        match (best, cand) {
            (Some(b), Some(c)) => Some(if self.tie_break().prefers(&c, &b) {
                c
            } else {
                b
            }),
            (b, c) => b.or(c),
        }
    }

    fn strip_dispatch<const TRACK: u8, const SUB: u8>(
        &self,
        span: &BlockSpan,
        first: usize,
        rpad: &[u8],
        top: &mut Edge,
        left: &mut Edge,
    ) -> Option<Scored> {
        #[cfg(target_arch = "x86_64")]
        {
            if self.simd == Simd::Avx512 {
                // SAFETY: the CPU supports the feature, checked when the kernel was built.
                return unsafe { self.strip_avx512::<TRACK, SUB>(span, first, rpad, top, left) };
            }
            if self.simd == Simd::Avx2 {
                // SAFETY: as above.
                return unsafe { self.strip_avx2::<TRACK, SUB>(span, first, rpad, top, left) };
            }
        }
        self.strip::<TRACK, SUB>(span, first, rpad, top, left)
    }

    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx512f,avx512bw,avx512vl,avx2")]
    unsafe fn strip_avx512<const TRACK: u8, const SUB: u8>(
        &self,
        span: &BlockSpan,
        first: usize,
        rpad: &[u8],
        top: &mut Edge,
        left: &mut Edge,
    ) -> Option<Scored> {
        self.strip::<TRACK, SUB>(span, first, rpad, top, left)
    }

    #[cfg(target_arch = "x86_64")]
    #[target_feature(enable = "avx2")]
    unsafe fn strip_avx2<const TRACK: u8, const SUB: u8>(
        &self,
        span: &BlockSpan,
        first: usize,
        rpad: &[u8],
        top: &mut Edge,
        left: &mut Edge,
    ) -> Option<Scored> {
        self.strip::<TRACK, SUB>(span, first, rpad, top, left)
    }

    /// Columns `first + 1 ..= first + LANES` of the block, one lane per
    /// column, sweeping anti-diagonals: at step `t` lane `c` holds row `t - c`.
    /// `left` enters as the column before the strip and leaves as its last.
    #[inline(always)]
    fn strip<const TRACK: u8, const SUB: u8>(
        &self,
        span: &BlockSpan,
        first: usize,
        rpad: &[u8],
        top: &mut Edge,
        left: &mut Edge,
    ) -> Option<Scored> {
        let rows = span.rows();
        let oe = self.scheme.open_extend();
        let ge = self.scheme.gap_extend;
        let floor = self.floor();
        let (table, k) = self.scheme.table();

        let mut profile = [[0i32; LANES]; PROFILE_ROWS];
        let b = &self.b[span.j0 + first..span.j0 + first + LANES];
        if SUB == SUB_TABLE {
            for (c, &bc) in b.iter().enumerate() {
                for x in 0..k {
                    profile[x][c] = table[bc as usize * k + x];
                }
            }
        }

        let b_codes: [i32; LANES] = std::array::from_fn(|c| b[c] as i32);
        let uni = self.uniform.unwrap_or(Uniform {
            same: 0,
            differ: 0,
            wildcard: None,
        });
        let wild = uni.wildcard.map_or(-1, i32::from);
        let top_h: &mut [i32; LANES] = (&mut top.h[first + 1..first + 1 + LANES])
            .try_into()
            .unwrap();
        let top_g: &mut [i32; LANES] = (&mut top.g[first + 1..first + 1 + LANES])
            .try_into()
            .unwrap();
        let (top_in_h, top_in_g) = (*top_h, *top_g);
        let mut bottom_h = top_in_h;
        let mut bottom_g = top_in_g;
        let col_h = &mut left.h[..];
        let col_e = &mut left.g[..];
        let corner_next = top_h[LANES - 1];

        let mut hp1 = [NEG_INF; LANES];
        let mut hp2 = [NEG_INF; LANES];
        let mut ep1 = [NEG_INF; LANES];
        let mut fp1 = [NEG_INF; LANES];
        hp1[0] = top_in_h[0];
        fp1[0] = top_in_g[0];
        let mut best_v = [i32::MIN; LANES];
        let mut best_t = [0i32; LANES];
        let rows32 = rows as i32;
        let lane_ids: [i32; LANES] = std::array::from_fn(|c| c as i32);

        // `$edge` is false only on steps where every lane holds an interior
        // row and neither border can be touched.
        macro_rules! step {
            ($t:expr, $edge:expr) => {{
                let t: usize = $t;
                let (lh0, le0) = if !$edge || t <= rows {
                    (col_h[t], col_e[t])
                } else {
                    (NEG_INF, NEG_INF)
                };
                let ld0 = if !$edge || t - 1 <= rows {
                    col_h[t - 1]
                } else {
                    NEG_INF
                };
                let window: &[u8; LANES] = rpad[rows + LANES - t..rows + 2 * LANES - t]
                    .try_into()
                    .unwrap();

                let lh = shift_in(lh0, &hp1);
                let le = shift_in(le0, &ep1);
                let ld = shift_in(ld0, &hp2);

                let mut h = [0; LANES];
                let mut e = [0; LANES];
                let mut f = [0; LANES];
                for c in 0..LANES {
                    let sub = match SUB {
                        SUB_TABLE => profile[window[c] as usize % PROFILE_ROWS][c],
                        _ => {
                            let x = window[c] as i32;
                            let s = if x == b_codes[c] {
                                uni.same
                            } else {
                                uni.differ
                            };
                            if SUB == SUB_EQ_WILD && (x == wild || b_codes[c] == wild) {
                                0
                            } else {
                                s
                            }
                        }
                    };
                    let ev = (lh[c] - oe).max(le[c] - ge);
                    let fv = (hp1[c] - oe).max(fp1[c] - ge);
                    h[c] = (ld[c] + sub).max(ev).max(fv.max(floor));
                    e[c] = ev;
                    f[c] = fv;
                }
                let t32 = t as i32;
                if $edge && t < LANES {
                    // lane t sits on the top border row
                    for c in 0..LANES {
                        let on_border = lane_ids[c] == t32;
                        h[c] = if on_border { top_in_h[c] } else { h[c] };
                        f[c] = if on_border { top_in_g[c] } else { f[c] };
                    }
                }
                if TRACK != 0 {
                    for c in 0..LANES {
                        let row = t32 - lane_ids[c];
                        let cand = if !$edge || (row >= 1 && row <= rows32) {
                            h[c]
                        } else {
                            i32::MIN
                        };
                        let better = if TRACK == 1 {
                            cand > best_v[c]
                        } else {
                            cand >= best_v[c]
                        };
                        best_v[c] = if better { cand } else { best_v[c] };
                        best_t[c] = if better { t32 } else { best_t[c] };
                    }
                }
                if !$edge || t >= LANES {
                    col_h[t + 1 - LANES] = h[LANES - 1];
                    col_e[t + 1 - LANES] = e[LANES - 1];
                }
                if $edge && t >= rows {
                    // lane t - rows sits on the bottom row
                    let lane = t32 - rows32;
                    for c in 0..LANES {
                        let on_bottom = lane_ids[c] == lane;
                        bottom_h[c] = if on_bottom { h[c] } else { bottom_h[c] };
                        bottom_g[c] = if on_bottom { f[c] } else { bottom_g[c] };
                    }
                }
                hp2 = hp1;
                hp1 = h;
                ep1 = e;
                fp1 = f;
            }};
        }

        let steady = LANES..rows.max(LANES);
        for t in 1..steady.start {
            step!(t, true);
        }
        #[cfg(target_arch = "x86_64")]
        let wide = self.simd == Simd::Avx512 && !steady.is_empty();
        #[cfg(not(target_arch = "x86_64"))]
        let wide = false;
        if wide {
            #[cfg(target_arch = "x86_64")]
            {
                let mut lanes = avx512::Lanes {
                    hp1,
                    hp2,
                    ep1,
                    fp1,
                    best_v,
                    best_t,
                };
                let params = avx512::Params {
                    oe,
                    ge,
                    floor,
                    same: uni.same,
                    differ: uni.differ,
                    wild,
                    b_codes,
                    profile: &profile,
                };
                // SAFETY: `wide` implies the CPU has AVX-512; the step range lies
                // inside `rpad` and both columns, which hold `rows + 1` entries.
                unsafe {
                    avx512::steady::<TRACK, SUB>(
                        steady.clone(),
                        rows,
                        rpad,
                        col_h,
                        col_e,
                        &mut lanes,
                        &params,
                    );
                }
                avx512::Lanes {
                    hp1,
                    hp2,
                    ep1,
                    fp1,
                    best_v,
                    best_t,
                } = lanes;
            }
        } else {
            for t in steady.clone() {
                step!(t, false);
            }
        }
        for t in steady.end..rows + LANES {
            step!(t, true);
        }
        *top_h = bottom_h;
        *top_g = bottom_g;
        col_h[0] = corner_next;

        if TRACK == 0 {
            return None;
        }
        let tie = self.tie_break();
        let mut best: Option<Scored> = None;
        for c in 0..LANES {
            let cand = Scored {
                score: best_v[c],
                at: Coord::new(span.i0 + best_t[c] as usize - c, span.j0 + first + 1 + c),
            };
            if best.is_none_or(|cur| tie.prefers(&cand, &cur)) {
                best = Some(cand);
            }
        }
        best
    }

    /// Plain column sweep over block columns `first + 1 ..= cols`.
    fn scalar_columns<const TRACK: u8>(
        &self,
        span: &BlockSpan,
        first: usize,
        top: &mut Edge,
        left: &mut Edge,
    ) -> Option<Scored> {
        let a = &self.a[span.i0..span.i1];
        let b = &self.b[span.j0 + first..span.j1];
        let oe = self.scheme.open_extend();
        let ge = self.scheme.gap_extend;
        let floor = self.floor();

        let hcol = &mut left.h[..];
        let ecol = &mut left.g[..];
        let mut best: Option<Scored> = None;
        for (jj, &bj) in b.iter().enumerate() {
            let jj = first + jj + 1;
            let prof = self.scheme.column(bj);
            let mut diag = hcol[0];
            let mut h_up = top.h[jj];
            let mut f = top.g[jj];
            hcol[0] = h_up;
            let mut col_best = i32::MIN;
            let mut col_i = 0;
            for (ii, ((hc, ec), &ai)) in hcol[1..]
                .iter_mut()
                .zip(ecol[1..].iter_mut())
                .zip(a)
                .enumerate()
            {
                let e = (*hc - oe).max(*ec - ge);
                f = (h_up - oe).max(f - ge);
                let h = (diag + prof[ai as usize]).max(e).max(f.max(floor));
                diag = *hc;
                *hc = h;
                *ec = e;
                h_up = h;
                if TRACK == 1 && h > col_best || TRACK == 2 && h >= col_best {
                    col_best = h;
                    col_i = ii + 1;
                }
            }
            top.h[jj] = h_up;
            top.g[jj] = f;
            if TRACK != 0 && !a.is_empty() {
                let cand = Scored {
                    score: col_best,
                    at: Coord::new(span.i0 + col_i, span.j0 + jj),
                };
                best = self.fold(best, Some(cand));
            }
        }
        best
    }
}

impl CellKernel for GotohKernel<'_> {
    fn top_border(&self, j: usize) -> (i32, i32) {
        let h = match self.borders {
            Borders::Local => 0,
            Borders::Anchored if j == 0 => 0,
            Borders::Anchored => NEG_INF,
            Borders::Global(GapState::Free) => self.gap(j),
            Borders::Global(GapState::Delete) => NEG_INF,
        };
        (h, NEG_INF)
    }

    fn left_border(&self, i: usize) -> (i32, i32) {
        let h = match self.borders {
            Borders::Local => 0,
            Borders::Anchored if i > 0 => NEG_INF,
            Borders::Anchored => 0,
            Borders::Global(GapState::Delete) if i == 0 => NEG_INF,
            Borders::Global(_) => self.gap(i),
        };
        (h, NEG_INF)
    }

    fn skip_fill(&self) -> i32 {
        self.floor()
    }

    fn tie_break(&self) -> TieBreak {
        self.track.unwrap_or(TieBreak::SmallestCoord)
    }

    fn solve(&self, span: &BlockSpan, top: &mut Edge, left: &mut Edge) -> Option<Scored> {
        match self.track {
            None => self.solve_tracked::<0>(span, top, left),
            Some(TieBreak::SmallestCoord) => self.solve_tracked::<1>(span, top, left),
            Some(TieBreak::LargestCoord) => self.solve_tracked::<2>(span, top, left),
        }
    }
}


/// Hand-vectorized steady phase of [`GotohKernel::strip`], where every lane
/// holds an interior row.
#[cfg(target_arch = "x86_64")]
mod avx512 {
    use std::arch::x86_64::*;
    use std::ops::Range;

    use super::{LANES, PROFILE_ROWS, SUB_EQ_WILD, SUB_TABLE};

    pub(super) struct Lanes {
        pub hp1: [i32; LANES],
        pub hp2: [i32; LANES],
        pub ep1: [i32; LANES],
        pub fp1: [i32; LANES],
        pub best_v: [i32; LANES],
        pub best_t: [i32; LANES],
    }

    pub(super) struct Params<'p> {
        pub oe: i32,
        pub ge: i32,
        pub floor: i32,
        pub same: i32,
        pub differ: i32,
        pub wild: i32,
        pub b_codes: [i32; LANES],
        pub profile: &'p [[i32; LANES]; PROFILE_ROWS],
    }

    #[inline(always)]
    unsafe fn load(v: &[i32; LANES]) -> __m512i {
        _mm512_loadu_si512(v.as_ptr().cast())
    }

    #[inline(always)]
    unsafe fn store(v: __m512i, out: &mut [i32; LANES]) {
        _mm512_storeu_si512(out.as_mut_ptr().cast(), v)
    }

    #[inline(always)]
    unsafe fn last_lane(v: __m512i) -> i32 {
        _mm_extract_epi32::<3>(_mm512_extracti32x4_epi32::<3>(v))
    }

    /// `[first, v[0], .., v[LANES - 2]]`
    #[inline(always)]
    unsafe fn shift_in(first: i32, v: __m512i) -> __m512i {
        _mm512_alignr_epi32::<15>(v, _mm512_set1_epi32(first))
    }

    #[target_feature(enable = "avx512f,avx512bw,avx512vl")]
    pub(super) unsafe fn steady<const TRACK: u8, const SUB: u8>(
        steps: Range<usize>,
        rows: usize,
        rpad: &[u8],
        col_h: &mut [i32],
        col_e: &mut [i32],
        lanes: &mut Lanes,
        p: &Params,
    ) {
        assert!(
            steps.start >= LANES && steps.end <= rows && col_h.len() > rows && col_e.len() > rows
        );
        assert!(rpad.len() >= rows + 2 * LANES);
        let oe = _mm512_set1_epi32(p.oe);
        let ge = _mm512_set1_epi32(p.ge);
        let floor = _mm512_set1_epi32(p.floor);
        let same = _mm512_set1_epi32(p.same);
        let differ = _mm512_set1_epi32(p.differ);
        let wild = _mm512_set1_epi32(p.wild);
        let b_codes = load(&p.b_codes);
        let b_wild = _mm512_cmpeq_epi32_mask(b_codes, wild);
        // profile[x][c] sits at x * LANES + c
        let lane_offsets = _mm512_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15);
        let profile = p.profile.as_ptr().cast::<i32>();

        let mut hp1 = load(&lanes.hp1);
        let mut hp2 = load(&lanes.hp2);
        let mut ep1 = load(&lanes.ep1);
        let mut fp1 = load(&lanes.fp1);
        let mut best_v = load(&lanes.best_v);
        let mut best_t = load(&lanes.best_t);
        let mut t_vec = _mm512_set1_epi32(steps.start as i32);
        let one = _mm512_set1_epi32(1);

        let ch = col_h.as_mut_ptr();
        let ce = col_e.as_mut_ptr();
        let window_base = rpad.as_ptr().add(rows + LANES);
        for t in steps {
            let lh = shift_in(*ch.add(t), hp1);
            let le = shift_in(*ce.add(t), ep1);
            let ld = shift_in(*ch.add(t - 1), hp2);

            let window = _mm512_cvtepu8_epi32(_mm_loadu_si128(window_base.sub(t).cast()));
            let sub = if SUB == SUB_TABLE {
                let idx = _mm512_add_epi32(_mm512_slli_epi32::<4>(window), lane_offsets);
                _mm512_i32gather_epi32::<4>(idx, profile.cast())
            } else {
                let eq = _mm512_cmpeq_epi32_mask(window, b_codes);
                let s = _mm512_mask_blend_epi32(eq, differ, same);
                if SUB == SUB_EQ_WILD {
                    let w = _mm512_cmpeq_epi32_mask(window, wild) | b_wild;
                    _mm512_maskz_mov_epi32(!w, s)
                } else {
                    s
                }
            };

            let e = _mm512_max_epi32(_mm512_sub_epi32(lh, oe), _mm512_sub_epi32(le, ge));
            let f = _mm512_max_epi32(_mm512_sub_epi32(hp1, oe), _mm512_sub_epi32(fp1, ge));
            let h = _mm512_max_epi32(
                _mm512_max_epi32(_mm512_add_epi32(ld, sub), e),
                _mm512_max_epi32(f, floor),
            );

            if TRACK != 0 {
                let better = if TRACK == 1 {
                    _mm512_cmpgt_epi32_mask(h, best_v)
                } else {
                    _mm512_cmpge_epi32_mask(h, best_v)
                };
                best_v = _mm512_mask_mov_epi32(best_v, better, h);
                best_t = _mm512_mask_mov_epi32(best_t, better, t_vec);
                t_vec = _mm512_add_epi32(t_vec, one);
            }

            *ch.add(t + 1 - LANES) = last_lane(h);
            *ce.add(t + 1 - LANES) = last_lane(e);
            hp2 = hp1;
            hp1 = h;
            ep1 = e;
            fp1 = f;
        }
        store(hp1, &mut lanes.hp1);
        store(hp2, &mut lanes.hp2);
        store(ep1, &mut lanes.ep1);
        store(fp1, &mut lanes.fp1);
        store(best_v, &mut lanes.best_v);
        store(best_t, &mut lanes.best_t);
    }
}
