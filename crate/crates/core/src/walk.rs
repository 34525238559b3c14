//! Constructions on the line and the strip driven by the counting walk
//! `F`, which steps up by one at every red first coordinate and down by one
//! at every blue one, is right-continuous, and is anchored to `0` at the
//! left edge of the window.
//!
//! Quantities defined through infima or suprema over the whole line are
//! evaluated over the window only. Points whose rule cannot be resolved
//! inside the window (an excursion that does not close, points right of
//! the last zero or outside the outermost cut times) are left unmatched
//! and counted in [`WindowedMatching`].
//!
//! Walk blocks are right-closed intervals `(a, b]`, matching the
//! right-continuity of `F`: the point sitting at `b` belongs to the block.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::{
    brute_force_min, min_cost_all_blue, min_cost_perfect, Matching, MatchingKind, EPS_TIE,
};
use crate::geometry::{segments_intersect, Domain, Point, Rect, Segment};
use crate::point_process::{stream_rng, ColoredPointSet};
use crate::verify::{VerificationReport, Witness};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    Red,
    Blue,
}

/// One step of the walk: the point with this first coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub x: f64,
    pub sign: i8,
    pub color: Color,
    /// Index into the red or blue list.
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepWalk {
    pub x0: f64,
    pub x1: f64,
    pub base: i64,
    pub jumps: Vec<Jump>,
    /// `prefix[k]` is the value after the first `k` jumps.
    prefix: Vec<i64>,
}

impl StepWalk {
    /// `F(t)`, right-continuous.
    pub fn value_at(&self, t: f64) -> i64 {
        self.prefix[self.jumps.partition_point(|j| j.x <= t)]
    }

    /// `F(t-)`.
    pub fn left_limit(&self, t: f64) -> i64 {
        self.prefix[self.jumps.partition_point(|j| j.x < t)]
    }

    /// Value just before jump `k`.
    pub fn level_before(&self, k: usize) -> i64 {
        self.prefix[k]
    }

    /// Value at jump `k` (after the step).
    pub fn level_at(&self, k: usize) -> i64 {
        self.prefix[k + 1]
    }

    pub fn levels(&self) -> &[i64] {
        &self.prefix
    }

    /// Jump position of each red and each blue point.
    pub fn jump_positions(&self, n_red: usize, n_blue: usize) -> (Vec<usize>, Vec<usize>) {
        let mut red = vec![0; n_red];
        let mut blue = vec![0; n_blue];
        for (k, j) in self.jumps.iter().enumerate() {
            match j.color {
                Color::Red => red[j.index] = k,
                Color::Blue => blue[j.index] = k,
            }
        }
        (red, blue)
    }
}

fn x_range(domain: &Domain, allow_line: bool) -> Result<(f64, f64)> {
    match *domain {
        Domain::Strip { x0, x1 } => Ok((x0, x1)),
        Domain::Line { x0, x1 } if allow_line => Ok((x0, x1)),
        _ => Err(Error::WrongDomain {
            expected: if allow_line { "line or strip" } else { "strip" },
            found: domain.name(),
        }),
    }
}

/// Builds `F` for a line or strip configuration.
pub fn build_walk(ps: &ColoredPointSet) -> Result<StepWalk> {
    let (x0, x1) = x_range(&ps.domain, true)?;
    let mut jumps: Vec<Jump> = ps
        .reds
        .iter()
        .enumerate()
        .map(|(index, p)| Jump { x: p.x, sign: 1, color: Color::Red, index })
        .chain(
            ps.blues
                .iter()
                .enumerate()
                .map(|(index, p)| Jump { x: p.x, sign: -1, color: Color::Blue, index }),
        )
        .collect();
    jumps.sort_by(|a, b| a.x.total_cmp(&b.x));
    if let Some(w) = jumps.windows(2).find(|w| w[0].x == w[1].x) {
        return Err(Error::DuplicateCoordinate(w[0].x));
    }
    let mut prefix = Vec::with_capacity(jumps.len() + 1);
    prefix.push(0);
    for j in &jumps {
        prefix.push(prefix.last().unwrap() + j.sign as i64);
    }
    Ok(StepWalk { x0, x1, base: 0, jumps, prefix })
}

/// A matching restricted to a finite window, with the count of points
/// whose defining rule did not resolve inside the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowedMatching {
    pub matching: Matching,
    pub unresolved_reds: usize,
    pub unresolved_blues: usize,
    /// Block boundaries used by the construction (zeros or cut times).
    pub boundaries: Vec<f64>,
}

fn split_block(walk: &StepWalk, lo: usize, hi: usize) -> (Vec<usize>, Vec<usize>) {
    let mut reds = Vec::new();
    let mut blues = Vec::new();
    for j in &walk.jumps[lo..hi] {
        match j.color {
            Color::Red => reds.push(j.index),
            Color::Blue => blues.push(j.index),
        }
    }
    (reds, blues)
}

fn gather(points: &[Point], idx: &[usize]) -> Vec<Point> {
    idx.iter().map(|&i| points[i]).collect()
}

fn count_unresolved(walk: &StepWalk, ranges: impl Iterator<Item = (usize, usize)>) -> (usize, usize) {
    let (mut r, mut b) = (0, 0);
    for (lo, hi) in ranges {
        for j in &walk.jumps[lo..hi] {
            match j.color {
                Color::Red => r += 1,
                Color::Blue => b += 1,
            }
        }
    }
    (r, b)
}

/// Balanced blocks between consecutive zeros of `F`, each matched by
/// minimum total length.
///
/// The zero set is `{z : F(z) = 0, F(z-) != 0}`. Because `F` is anchored at
/// `0` on the window's left edge, that edge opens the first block; points
/// right of the last zero are unresolved.
pub fn zero_block_matching(ps: &ColoredPointSet) -> Result<WindowedMatching> {
    x_range(&ps.domain, false)?;
    let walk = build_walk(ps)?;
    // Block `s` covers jumps `cuts[s]..cuts[s + 1]`.
    let mut cuts = vec![0usize];
    let mut boundaries = vec![walk.x0];
    for k in 0..walk.jumps.len() {
        if walk.level_at(k) == 0 && walk.level_before(k) != 0 {
            cuts.push(k + 1);
            boundaries.push(walk.jumps[k].x);
        }
    }
    let mut edges = Vec::new();
    for w in cuts.windows(2) {
        let (ri, bi) = split_block(&walk, w[0], w[1]);
        let m = min_cost_perfect(&gather(&ps.reds, &ri), &gather(&ps.blues, &bi))?;
        edges.extend(m.edges.into_iter().map(|(r, b)| (ri[r], bi[b])));
    }
    let last = *cuts.last().unwrap();
    let (unresolved_reds, unresolved_blues) =
        count_unresolved(&walk, std::iter::once((last, walk.jumps.len())));
    Ok(WindowedMatching {
        matching: Matching::new(MatchingKind::Partial, edges),
        unresolved_reds,
        unresolved_blues,
        boundaries,
    })
}

/// Pairs consecutive reds (by first coordinate): `(r0, r1), (r2, r3), ...`
/// when `coin` is false, the shifted `(r1, r2), (r3, r4), ...` when true.
pub fn one_color_pairing(ps: &ColoredPointSet, coin: bool) -> Result<WindowedMatching> {
    x_range(&ps.domain, false)?;
    let n = ps.reds.len();
    let start = usize::from(coin);
    let edges: Vec<(usize, usize)> = (start..n)
        .step_by(2)
        .filter(|&i| i + 1 < n)
        .map(|i| (i, i + 1))
        .collect();
    let unresolved_reds = n - 2 * edges.len();
    Ok(WindowedMatching {
        matching: Matching::new(MatchingKind::OneColor, edges),
        unresolved_reds,
        unresolved_blues: 0,
        boundaries: Vec::new(),
    })
}

/// Cut times of `F` within the window: red jumps `x` with
/// `sup_{t<x} F(t) = F(x-) < F(x) = inf_{t>=x} F(t)`.
pub fn cut_times(walk: &StepWalk) -> Vec<usize> {
    let m = walk.jumps.len();
    let levels = walk.levels();
    let mut suffix_min = vec![i64::MAX; m + 2];
    for k in (0..=m).rev() {
        suffix_min[k] = suffix_min[k + 1].min(levels[k]);
    }
    let mut out = Vec::new();
    let mut running_max = i64::MIN;
    for k in 0..m {
        running_max = running_max.max(levels[k]);
        let before = levels[k];
        let after = levels[k + 1];
        if running_max == before && before < after && suffix_min[k + 1] == after {
            out.push(k);
        }
    }
    out
}

/// Between consecutive cut times, the minimum-length matching among those
/// that match every blue point. Requires more red than blue intensity for
/// cut times to have positive density.
pub fn cut_time_matching(ps: &ColoredPointSet) -> Result<WindowedMatching> {
    x_range(&ps.domain, false)?;
    let walk = build_walk(ps)?;
    let cuts = cut_times(&walk);
    let boundaries = cuts.iter().map(|&k| walk.jumps[k].x).collect();
    let mut edges = Vec::new();
    for w in cuts.windows(2) {
        // (c_s, c_{s+1}] holds jumps c_s + 1 ..= c_{s+1}.
        let (ri, bi) = split_block(&walk, w[0] + 1, w[1] + 1);
        let m = min_cost_all_blue(&gather(&ps.reds, &ri), &gather(&ps.blues, &bi))?;
        edges.extend(m.edges.into_iter().map(|(r, b)| (ri[r], bi[b])));
    }
    let m = walk.jumps.len();
    let outside: Vec<(usize, usize)> = match (cuts.first(), cuts.last()) {
        (Some(&first), Some(&last)) => vec![(0, first + 1), (last + 1, m)],
        _ => vec![(0, m)],
    };
    let (unresolved_reds, unresolved_blues) = count_unresolved(&walk, outside.into_iter());
    Ok(WindowedMatching {
        matching: Matching::new(MatchingKind::Partial, edges),
        unresolved_reds,
        unresolved_blues,
        boundaries,
    })
}

/// Each red `r` is matched to the blue at `inf{t > r : F(t) = F(r-)}`, the
/// end of the upward excursion that starts at `r`.
pub fn excursion_matching(ps: &ColoredPointSet) -> Result<WindowedMatching> {
    let walk = build_walk(ps)?;
    let mut open: Vec<usize> = Vec::new();
    let mut edges = Vec::new();
    let mut unresolved_blues = 0;
    for j in &walk.jumps {
        match j.color {
            Color::Red => open.push(j.index),
            Color::Blue => match open.pop() {
                Some(r) => edges.push((r, j.index)),
                None => unresolved_blues += 1,
            },
        }
    }
    Ok(WindowedMatching {
        matching: Matching::new(MatchingKind::Partial, edges),
        unresolved_reds: open.len(),
        unresolved_blues,
        boundaries: Vec::new(),
    })
}

/// Maximal closed excursion of `F` above a level: jumps `start..=end`, with
/// the walk at `level` just before `start` and again at `end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcursionBlock {
    pub start: usize,
    pub end: usize,
    pub level: i64,
}

/// Top-level excursions inside which every point is matched by
/// [`excursion_matching`].
pub fn closed_excursion_blocks(walk: &StepWalk) -> Vec<ExcursionBlock> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (k, j) in walk.jumps.iter().enumerate() {
        match j.color {
            Color::Red => {
                if depth == 0 {
                    start = k;
                }
                depth += 1;
            }
            Color::Blue if depth > 0 => {
                depth -= 1;
                if depth == 0 {
                    out.push(ExcursionBlock { start, end: k, level: walk.level_before(start) });
                }
            }
            Color::Blue => {}
        }
    }
    out
}

/// Polygonal arc `r, (r1, H), (b1, H), b` for one excursion edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcSpec {
    pub edge: (usize, usize),
    /// `H = L / D`.
    pub height: f64,
    /// Lowest point height over `[r1, b1]`, endpoints included.
    pub lowest: f64,
    /// Maximum nesting depth `max_{t in [r1, b1]} F(t) - F(r1-)`.
    pub depth: u32,
    pub vertices: [Point; 4],
}

impl ArcSpec {
    /// Non-degenerate pieces of the polyline.
    pub fn segments(&self) -> Vec<Segment> {
        self.vertices
            .windows(2)
            .filter_map(|w| Segment::new(w[0], w[1]).ok())
            .collect()
    }

    pub fn translate(&self, dx: f64, dy: f64) -> ArcSpec {
        ArcSpec {
            height: self.height + dy,
            vertices: self.vertices.map(|p| p.translate(dx, dy)),
            ..self.clone()
        }
    }
}

/// Arcs for an excursion matching on the strip.
pub fn polygonal_arcs(m: &Matching, ps: &ColoredPointSet) -> Result<Vec<ArcSpec>> {
    x_range(&ps.domain, false)?;
    let walk = build_walk(ps)?;
    let (red_pos, blue_pos) = walk.jump_positions(ps.reds.len(), ps.blues.len());
    let height_of = |j: &Jump| match j.color {
        Color::Red => ps.reds[j.index].y,
        Color::Blue => ps.blues[j.index].y,
    };
    let levels = walk.levels();
    m.edges
        .iter()
        .map(|&(ri, bi)| {
            let (kr, kb) = (red_pos[ri], blue_pos[bi]);
            if kr >= kb {
                return Err(Error::InvalidMatching(format!(
                    "edge ({ri}, {bi}) does not run left to right"
                )));
            }
            let lowest = walk.jumps[kr..=kb].iter().map(height_of).fold(f64::INFINITY, f64::min);
            let peak = levels[kr + 1..=kb + 1].iter().copied().max().unwrap();
            let depth = peak - levels[kr];
            if depth < 1 {
                return Err(Error::InvalidMatching(format!("edge ({ri}, {bi}) is not an excursion")));
            }
            let height = lowest / depth as f64;
            let (r, b) = (ps.reds[ri], ps.blues[bi]);
            Ok(ArcSpec {
                edge: (ri, bi),
                height,
                lowest,
                depth: depth as u32,
                vertices: [r, Point::new(r.x, height), Point::new(b.x, height), b],
            })
        })
        .collect()
}

/// Pairs of arcs whose polylines meet.
pub fn arc_intersections(arcs: &[ArcSpec]) -> Result<Vec<(usize, usize)>> {
    let pieces: Vec<Vec<Segment>> = arcs.iter().map(ArcSpec::segments).collect();
    let bounds: Vec<Rect> = arcs
        .iter()
        .map(|a| {
            let xs = a.vertices.iter().map(|p| p.x);
            let ys = a.vertices.iter().map(|p| p.y);
            Rect {
                x0: xs.clone().fold(f64::INFINITY, f64::min),
                x1: xs.fold(f64::NEG_INFINITY, f64::max),
                y0: ys.clone().fold(f64::INFINITY, f64::min),
                y1: ys.fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect();
    let mut out = Vec::new();
    for i in 0..arcs.len() {
        for j in (i + 1)..arcs.len() {
            let (a, b) = (&bounds[i], &bounds[j]);
            if a.x1 < b.x0 || b.x1 < a.x0 || a.y1 < b.y0 || b.y1 < a.y0 {
                continue;
            }
            let mut hit = false;
            'outer: for s in &pieces[i] {
                for t in &pieces[j] {
                    if segments_intersect(s, t)? {
                        hit = true;
                        break 'outer;
                    }
                }
            }
            if hit {
                out.push((i, j));
            }
        }
    }
    Ok(out)
}

/// `h_m(t)`: the number of edges of a line matching whose interval covers
/// `t`, as a step function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingProfile {
    pub breakpoints: Vec<f64>,
    /// `values[k]` holds on `(breakpoints[k], breakpoints[k + 1])`.
    pub values: Vec<u32>,
}

impl CrossingProfile {
    /// Value at a point that is not a breakpoint.
    pub fn value_at(&self, t: f64) -> u32 {
        let k = self.breakpoints.partition_point(|&b| b < t);
        if k == 0 || k == self.breakpoints.len() {
            0
        } else {
            self.values[k - 1]
        }
    }

    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(&v, w)| v as f64 * (w[1] - w[0]))
            .sum()
    }
}

pub fn crossing_profile(m: &Matching, ps: &ColoredPointSet) -> Result<CrossingProfile> {
    if !matches!(ps.domain, Domain::Line { .. }) {
        return Err(Error::WrongDomain { expected: "line", found: ps.domain.name() });
    }
    let mut events: Vec<(f64, i32)> = Vec::with_capacity(2 * m.len());
    for e in 0..m.len() {
        let (p, q) = m.endpoints(e, &ps.reds, &ps.blues);
        let (lo, hi) = if p.x <= q.x { (p.x, q.x) } else { (q.x, p.x) };
        events.push((lo, 1));
        events.push((hi, -1));
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut breakpoints: Vec<f64> = Vec::new();
    let mut values = Vec::new();
    let mut level: i32 = 0;
    let mut i = 0;
    while i < events.len() {
        let x = events[i].0;
        while i < events.len() && events[i].0 == x {
            level += events[i].1;
            i += 1;
        }
        breakpoints.push(x);
        values.push(level as u32);
    }
    // The last pushed value is the level after the right-most breakpoint (0).
    values.pop();
    Ok(CrossingProfile { breakpoints, values })
}

/// Samples `trials` sets of `k` edges and compares each restriction with the
/// exhaustive minimum over its endpoints. Subsets are drawn uniformly from a
/// random run of `3k` consecutive edges (by red position), so the sampled
/// edges interleave or nest.
pub fn minimality_certificate_d1(
    m: &Matching,
    ps: &ColoredPointSet,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    if !matches!(ps.domain, Domain::Line { .. }) {
        return Err(Error::WrongDomain { expected: "line", found: ps.domain.name() });
    }
    if k == 0 || k > crate::assignment::BRUTE_FORCE_LIMIT - 1 {
        return Err(Error::InvalidParameter(format!("subset size {k} outside 1..=8")));
    }
    let mut report = VerificationReport::new("minimality_d1", trials);
    if m.len() < k {
        return Ok(report.finish());
    }
    let mut rng = stream_rng(seed, 0);
    let run = (3 * k).min(m.len());
    for _ in 0..trials {
        let start = rng.random_range(0..=m.len() - run);
        let chosen: Vec<usize> = {
            let mut v: Vec<usize> = index::sample(&mut rng, run, k).into_iter().map(|i| start + i).collect();
            v.sort_unstable();
            v
        };
        let r: Vec<Point> = chosen.iter().map(|&e| ps.reds[m.edges[e].0]).collect();
        let b: Vec<Point> = chosen.iter().map(|&e| ps.blues[m.edges[e].1]).collect();
        let current: f64 = r.iter().zip(&b).map(|(p, q)| p.dist(*q)).sum();
        let best = brute_force_min(&r, &b)?.total_length(&r, &b);
        if current > best + EPS_TIE {
            report.violations.push(Witness::Subset { edges: chosen, excess: current - best });
        }
    }
    Ok(report.finish())
}

/// Strip construction placed into one band of the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct StripBand {
    pub points: ColoredPointSet,
    pub matching: Matching,
    pub arcs: Option<Vec<ArcSpec>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Laminated {
    pub points: ColoredPointSet,
    pub matching: Matching,
    pub arcs: Vec<ArcSpec>,
}

/// Stacks strip results into `R x [first_band + i, first_band + i + 1)` and
/// shifts everything vertically by `shift`.
pub fn laminate_strips(bands: &[StripBand], first_band: i64, shift: f64) -> Result<Laminated> {
    if !(0.0..1.0).contains(&shift) {
        return Err(Error::InvalidParameter(format!("shift {shift} outside [0, 1)")));
    }
    let Some(first) = bands.first() else {
        return Err(Error::InvalidParameter("no bands to laminate".into()));
    };
    let (x0, x1) = x_range(&first.points.domain, false)?;
    for band in bands {
        if x_range(&band.points.domain, false)? != (x0, x1) {
            return Err(Error::InvalidParameter("bands must share the x-window".into()));
        }
    }
    let offset = |i: usize| (first_band + i as i64) as f64 + shift;

    let mut reds: Vec<(Point, usize, usize)> = Vec::new();
    let mut blues: Vec<(Point, usize, usize)> = Vec::new();
    for (bi, band) in bands.iter().enumerate() {
        let dy = offset(bi);
        reds.extend(band.points.reds.iter().enumerate().map(|(i, p)| (p.translate(0.0, dy), bi, i)));
        blues.extend(band.points.blues.iter().enumerate().map(|(i, p)| (p.translate(0.0, dy), bi, i)));
    }
    reds.sort_by(|a, b| a.0.lex_cmp(&b.0));
    blues.sort_by(|a, b| a.0.lex_cmp(&b.0));
    let mut red_map: Vec<Vec<usize>> = bands.iter().map(|b| vec![0; b.points.reds.len()]).collect();
    let mut blue_map: Vec<Vec<usize>> = bands.iter().map(|b| vec![0; b.points.blues.len()]).collect();
    for (g, &(_, bi, i)) in reds.iter().enumerate() {
        red_map[bi][i] = g;
    }
    for (g, &(_, bi, i)) in blues.iter().enumerate() {
        blue_map[bi][i] = g;
    }

    let kind = if bands.iter().all(|b| b.matching.kind == first.matching.kind) {
        first.matching.kind
    } else {
        MatchingKind::Partial
    };
    let mut edges = Vec::new();
    let mut arcs = Vec::new();
    for (bi, band) in bands.iter().enumerate() {
        let map_second = |j: usize| match band.matching.kind {
            MatchingKind::OneColor => red_map[bi][j],
            _ => blue_map[bi][j],
        };
        edges.extend(band.matching.edges.iter().map(|&(r, b)| (red_map[bi][r], map_second(b))));
        if let Some(band_arcs) = &band.arcs {
            for a in band_arcs {
                let mut moved = a.translate(0.0, offset(bi));
                moved.edge = (red_map[bi][a.edge.0], blue_map[bi][a.edge.1]);
                arcs.push(moved);
            }
        }
    }
    arcs.sort_by_key(|a| a.edge);
    let window = Rect::new(x0, x1, offset(0), offset(bands.len()))?;
    let points = ColoredPointSet {
        domain: Domain::plane(window)?,
        seed: first.points.seed,
        reds: reds.into_iter().map(|t| t.0).collect(),
        blues: blues.into_iter().map(|t| t.0).collect(),
    };
    Ok(Laminated { points, matching: Matching::new(kind, edges), arcs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point_process::{count_diff, derive_seed, sample, SampleConfig};

    fn strip(reds: &[f64], blues: &[f64]) -> ColoredPointSet {
        let r: Vec<(f64, f64)> = reds.iter().map(|&x| (x, 0.5)).collect();
        let b: Vec<(f64, f64)> = blues.iter().map(|&x| (x, 0.5)).collect();
        ColoredPointSet::on_strip(0.0, 10.0, &r, &b).unwrap()
    }

    fn edge_xs(ps: &ColoredPointSet, m: &Matching) -> Vec<(f64, f64)> {
        m.edges.iter().map(|&(r, b)| (ps.reds[r].x, ps.blues[b].x)).collect()
    }

    #[test]
    fn walk_single_pair() {
        let ps = ColoredPointSet::on_line(0.0, 5.0, &[1.0], &[2.0]).unwrap();
        let w = build_walk(&ps).unwrap();
        assert_eq!(w.value_at(0.0), 0);
        assert_eq!(w.value_at(0.99), 0);
        assert_eq!(w.value_at(1.0), 1);
        assert_eq!(w.left_limit(1.0), 0);
        assert_eq!(w.value_at(1.5), 1);
        assert_eq!(w.value_at(2.0), 0);
        assert_eq!(w.value_at(4.0), 0);
    }

    #[test]
    fn empty_walk_is_zero() {
        let ps = ColoredPointSet::on_line(0.0, 5.0, &[], &[]).unwrap();
        let w = build_walk(&ps).unwrap();
        assert!([0.0, 2.5, 4.9].iter().all(|&t| w.value_at(t) == 0));
        assert!(excursion_matching(&ps).unwrap().matching.is_empty());
    }

    #[test]
    fn duplicate_first_coordinates_rejected() {
        let ps = ColoredPointSet::on_strip(0.0, 5.0, &[(1.0, 0.2)], &[(1.0, 0.7)]).unwrap();
        assert_eq!(build_walk(&ps), Err(Error::DuplicateCoordinate(1.0)));
    }

    #[test]
    fn walk_increments_match_direct_counts() {
        let cfg = SampleConfig::unit(Domain::strip(0.0, 40.0).unwrap(), 11);
        let ps = sample(&cfg).unwrap();
        let w = build_walk(&ps).unwrap();
        let mut rng = stream_rng(5, 0);
        for _ in 0..100 {
            let a: f64 = rng.random_range(0.0..40.0);
            let b: f64 = rng.random_range(0.0..40.0);
            let (x, y) = if a < b { (a, b) } else { (b, a) };
            // Random x, y miss every point a.s., so open/closed ends agree.
            let direct = count_diff(&ps, &Rect::new(x, y, 0.0, 1.0).unwrap());
            assert_eq!(w.value_at(y) - w.value_at(x), direct);
        }
    }

    #[test]
    fn zero_blocks_hand_traces() {
        let ps = strip(&[1.0, 3.0], &[2.0, 4.0]);
        let z = zero_block_matching(&ps).unwrap();
        assert_eq!(z.boundaries, vec![0.0, 2.0, 4.0]);
        assert_eq!(edge_xs(&ps, &z.matching), vec![(1.0, 2.0), (3.0, 4.0)]);

        let ps = strip(&[2.0, 4.0], &[1.0, 3.0]);
        let z = zero_block_matching(&ps).unwrap();
        assert_eq!(z.boundaries, vec![0.0, 2.0, 4.0]);
        assert_eq!(edge_xs(&ps, &z.matching), vec![(2.0, 1.0), (4.0, 3.0)]);
        assert_eq!((z.unresolved_reds, z.unresolved_blues), (0, 0));

        let ps = strip(&[], &[]);
        assert!(zero_block_matching(&ps).unwrap().matching.is_empty());
    }

    #[test]
    fn zero_blocks_leave_tail_unresolved() {
        let ps = strip(&[1.0, 3.0, 5.0], &[2.0]);
        let z = zero_block_matching(&ps).unwrap();
        assert_eq!(z.matching.len(), 1);
        assert_eq!((z.unresolved_reds, z.unresolved_blues), (2, 0));
    }

    #[test]
    fn zero_blocks_require_strip() {
        let ps = ColoredPointSet::on_line(0.0, 5.0, &[1.0], &[2.0]).unwrap();
        assert!(matches!(zero_block_matching(&ps), Err(Error::WrongDomain { .. })));
    }

    #[test]
    fn one_color_pairings() {
        let ps = strip(&[1.0, 2.0, 3.0, 4.0], &[]);
        let even = one_color_pairing(&ps, false).unwrap();
        assert_eq!(even.matching.edges, vec![(0, 1), (2, 3)]);
        let odd = one_color_pairing(&ps, true).unwrap();
        assert_eq!(odd.matching.edges, vec![(1, 2)]);
        assert_eq!(odd.unresolved_reds, 2);
        let single = strip(&[1.0], &[]);
        assert!(one_color_pairing(&single, false).unwrap().matching.is_empty());
    }

    #[test]
    fn cut_times_of_increasing_walk() {
        let ps = strip(&[1.0, 2.0, 3.0], &[]);
        let w = build_walk(&ps).unwrap();
        assert_eq!(cut_times(&w), vec![0, 1, 2]);
        let c = cut_time_matching(&ps).unwrap();
        assert_eq!(c.boundaries, vec![1.0, 2.0, 3.0]);
        assert!(c.matching.is_empty());
    }

    #[test]
    fn all_blue_sample_has_no_cut_times() {
        let ps = strip(&[], &[1.0, 2.0, 3.0]);
        assert!(cut_times(&build_walk(&ps).unwrap()).is_empty());
        let c = cut_time_matching(&ps).unwrap();
        assert_eq!(c.unresolved_blues, 3);
    }

    #[test]
    fn cut_time_condition_by_hand() {
        // F: 0 ->1 (r@1) ->0 (b@2) ->1 (r@3) ->2 (r@4).
        // r@1: F later dips to 0 < 1. r@3: F(3-) = 0 is below the earlier
        // value 1. r@4: sup before is 1 = F(4-) and F stays at 2.
        let ps = strip(&[1.0, 3.0, 4.0], &[2.0]);
        let w = build_walk(&ps).unwrap();
        assert_eq!(cut_times(&w), vec![3]);
    }

    #[test]
    fn cut_time_blocks_have_red_excess() {
        let mut cfg = SampleConfig::unit(Domain::strip(0.0, 50.0).unwrap(), 3);
        cfg.lambda_red = 2.0;
        for seed in 0..10 {
            cfg.seed = seed;
            let ps = sample(&cfg).unwrap();
            let w = build_walk(&ps).unwrap();
            let cuts = cut_times(&w);
            for pair in cuts.windows(2) {
                let (r, b) = split_block(&w, pair[0] + 1, pair[1] + 1);
                assert!(r.len() > b.len());
            }
            let c = cut_time_matching(&ps).unwrap();
            c.matching.validate(ps.reds.len(), ps.blues.len()).unwrap();
            if let (Some(&first), Some(&last)) = (cuts.first(), cuts.last()) {
                let partners = c.matching.blue_partners(ps.blues.len());
                for j in &w.jumps[first + 1..=last] {
                    if j.color == Color::Blue {
                        assert!(partners[j.index].is_some());
                    }
                }
            }
        }
    }

    #[test]
    fn excursion_hand_traces() {
        let ps = ColoredPointSet::on_line(0.0, 10.0, &[1.0, 2.0], &[3.0, 4.0]).unwrap();
        let e = excursion_matching(&ps).unwrap();
        let mut xs = edge_xs(&ps, &e.matching);
        xs.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert_eq!(xs, vec![(1.0, 4.0), (2.0, 3.0)]);

        let ps = ColoredPointSet::on_line(0.0, 10.0, &[1.0], &[2.0]).unwrap();
        assert_eq!(edge_xs(&ps, &excursion_matching(&ps).unwrap().matching), vec![(1.0, 2.0)]);

        let ps = ColoredPointSet::on_line(0.0, 10.0, &[1.0, 3.0], &[2.0, 4.0]).unwrap();
        assert_eq!(
            edge_xs(&ps, &excursion_matching(&ps).unwrap().matching),
            vec![(1.0, 2.0), (3.0, 4.0)]
        );
    }

    #[test]
    fn excursion_unresolved_ends() {
        let ps = ColoredPointSet::on_line(0.0, 10.0, &[2.0, 5.0], &[1.0, 3.0]).unwrap();
        let e = excursion_matching(&ps).unwrap();
        assert_eq!(e.matching.len(), 1);
        assert_eq!((e.unresolved_reds, e.unresolved_blues), (1, 1));
    }

    #[test]
    fn excursion_intervals_nest_or_are_disjoint() {
        for seed in 0..10 {
            let ps = sample(&SampleConfig::unit(Domain::line(0.0, 100.0).unwrap(), seed)).unwrap();
            let e = excursion_matching(&ps).unwrap();
            let iv = edge_xs(&ps, &e.matching);
            for (i, a) in iv.iter().enumerate() {
                assert!(a.0 < a.1);
                for b in &iv[i + 1..] {
                    let disjoint = a.1 < b.0 || b.1 < a.0;
                    let nested = (a.0 < b.0 && b.1 < a.1) || (b.0 < a.0 && a.1 < b.1);
                    assert!(disjoint || nested);
                }
            }
        }
    }

    #[test]
    fn arcs_simple_and_nested() {
        let ps = ColoredPointSet::on_strip(0.0, 10.0, &[(1.0, 0.6)], &[(2.0, 0.4)]).unwrap();
        let e = excursion_matching(&ps).unwrap();
        let arcs = polygonal_arcs(&e.matching, &ps).unwrap();
        assert_eq!(arcs[0].depth, 1);
        assert_eq!(arcs[0].height, 0.4);
        assert_eq!(arcs[0].lowest, 0.4);
        assert_eq!(arcs[0].segments().len(), 2, "the blue drop has zero length");

        let ps = strip(&[1.0, 2.0], &[3.0, 4.0]);
        let e = excursion_matching(&ps).unwrap();
        let arcs = polygonal_arcs(&e.matching, &ps).unwrap();
        let outer = arcs.iter().find(|a| ps.reds[a.edge.0].x == 1.0).unwrap();
        let inner = arcs.iter().find(|a| ps.reds[a.edge.0].x == 2.0).unwrap();
        assert_eq!((outer.depth, inner.depth), (2, 1));
        assert_eq!(outer.lowest, inner.lowest);
        assert!(outer.height < inner.height);
        assert!(arc_intersections(&arcs).unwrap().is_empty());
    }

    #[test]
    fn crossing_profile_examples() {
        let ps = ColoredPointSet::on_line(-1.0, 5.0, &[0.0], &[1.0]).unwrap();
        let m = Matching::new(MatchingKind::Perfect, vec![(0, 0)]);
        let h = crossing_profile(&m, &ps).unwrap();
        assert_eq!(h.values, vec![1]);
        assert_eq!(h.integral(), 1.0);
        assert_eq!(h.value_at(0.5), 1);
        assert_eq!(h.value_at(2.0), 0);

        let ps = ColoredPointSet::on_line(0.0, 5.0, &[1.0, 2.0], &[3.0, 4.0]).unwrap();
        let m = excursion_matching(&ps).unwrap().matching;
        let h = crossing_profile(&m, &ps).unwrap();
        assert_eq!(h.breakpoints, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(h.values, vec![1, 2, 1]);
        assert_eq!(h.integral(), 4.0);
    }

    #[test]
    fn excursion_profile_equals_walk_height() {
        for seed in 0..10 {
            let ps = sample(&SampleConfig::unit(Domain::line(0.0, 100.0).unwrap(), derive_seed(4, seed)))
                .unwrap();
            let walk = build_walk(&ps).unwrap();
            let m = excursion_matching(&ps).unwrap().matching;
            let h = crossing_profile(&m, &ps).unwrap();
            for block in closed_excursion_blocks(&walk) {
                for k in block.start..block.end {
                    let t = 0.5 * (walk.jumps[k].x + walk.jumps[k + 1].x);
                    assert_eq!(h.value_at(t) as i64, walk.value_at(t) - block.level);
                }
            }
        }
    }

    #[test]
    fn certificate_flags_corrupted_matching() {
        // reds 1, 4 and blues 2, 3 matched (1,3), (4,2): length 4 vs 2.
        let ps = ColoredPointSet::on_line(0.0, 5.0, &[1.0, 4.0], &[2.0, 3.0]).unwrap();
        let bad = Matching::new(MatchingKind::Perfect, vec![(0, 1), (1, 0)]);
        let rep = minimality_certificate_d1(&bad, &ps, 2, 5, 0).unwrap();
        assert!(!rep.pass);
        let good = excursion_matching(&ps).unwrap().matching;
        assert!(minimality_certificate_d1(&good, &ps, 2, 5, 0).unwrap().pass);
        assert!(minimality_certificate_d1(&good, &ps, 1, 5, 0).unwrap().pass);
    }

    #[test]
    fn laminate_single_band_identity() {
        let ps = ColoredPointSet::on_strip(0.0, 10.0, &[(1.0, 0.3)], &[(2.0, 0.6)]).unwrap();
        let m = excursion_matching(&ps).unwrap().matching;
        let lam = laminate_strips(&[StripBand { points: ps.clone(), matching: m.clone(), arcs: None }], 0, 0.0)
            .unwrap();
        assert_eq!(lam.points.reds, ps.reds);
        assert_eq!(lam.points.blues, ps.blues);
        assert_eq!(lam.matching, m);
    }

    #[test]
    fn laminate_two_bands() {
        let a = ColoredPointSet::on_strip(0.0, 10.0, &[(5.0, 0.3)], &[(6.0, 0.6)]).unwrap();
        let b = ColoredPointSet::on_strip(0.0, 10.0, &[(1.0, 0.5)], &[(9.0, 0.5)]).unwrap();
        let bands: Vec<StripBand> = [a, b]
            .into_iter()
            .map(|ps| {
                let m = excursion_matching(&ps).unwrap().matching;
                StripBand { points: ps, matching: m, arcs: None }
            })
            .collect();
        let lam = laminate_strips(&bands, 0, 0.25).unwrap();
        assert_eq!(lam.matching.len(), 2);
        assert_eq!(lam.points.domain.window().y0, 0.25);
        assert!(lam.points.reds.iter().any(|p| p.y == 1.75));
        let segs = lam.matching.segments(&lam.points.reds, &lam.points.blues).unwrap();
        assert!(!segments_intersect(&segs[0], &segs[1]).unwrap());
        assert!(laminate_strips(&bands, 0, 1.0).is_err());
    }
}
