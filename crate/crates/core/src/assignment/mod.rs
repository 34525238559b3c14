//! Exact minimum-length bipartite matchings of finite point sets.
//!
//! All solvers share one tie rule: among matchings whose lengths agree to
//! within [`EPS_TIE`], the one whose edge list (sorted by red index) has
//! the lexicographically smallest sequence of blue indices wins. Red and
//! blue lists are sorted by coordinates, so this is the lexicographic
//! order with respect to the coordinates of the points.

mod lap;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::geometry::{Point, Segment};
use crate::{Error, Result};

/// Tolerance for comparing total lengths.
pub const EPS_TIE: f64 = 1e-9;

/// Largest `n` accepted by [`brute_force_min`].
pub const BRUTE_FORCE_LIMIT: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchingKind {
    /// Every red and every blue point has degree one.
    Perfect,
    /// Degrees at most one.
    Partial,
    /// Edges join two red points; degrees at most one.
    OneColor,
}

/// Edges over a red list and a blue list. For [`MatchingKind::OneColor`]
/// both indices refer to reds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    pub kind: MatchingKind,
    pub edges: Vec<(usize, usize)>,
}

impl Matching {
    /// Sorts the edges into canonical order.
    pub fn new(kind: MatchingKind, mut edges: Vec<(usize, usize)>) -> Self {
        if kind == MatchingKind::OneColor {
            for e in edges.iter_mut() {
                if e.0 > e.1 {
                    *e = (e.1, e.0);
                }
            }
        }
        edges.sort_unstable();
        Self { kind, edges }
    }

    pub fn empty(kind: MatchingKind) -> Self {
        Self { kind, edges: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Checks index ranges and degrees, and completeness for perfect kind.
    pub fn validate(&self, n_red: usize, n_blue: usize) -> Result<()> {
        let mut red_deg = vec![0u8; n_red];
        let mut blue_deg = vec![0u8; n_blue];
        for &(a, b) in &self.edges {
            let (second, second_deg) = match self.kind {
                MatchingKind::OneColor => (b, &mut red_deg),
                _ => (b, &mut blue_deg),
            };
            if a >= n_red || second >= second_deg.len() {
                return Err(Error::InvalidMatching(format!("edge ({a}, {b}) out of range")));
            }
            second_deg[second] += 1;
            red_deg[a] += 1;
        }
        if red_deg.iter().chain(&blue_deg).any(|&d| d > 1) {
            return Err(Error::InvalidMatching("a point has degree above one".into()));
        }
        if self.kind == MatchingKind::Perfect && (self.edges.len() != n_red || n_red != n_blue) {
            return Err(Error::InvalidMatching(format!(
                "perfect matching has {} edges for {n_red} reds and {n_blue} blues",
                self.edges.len()
            )));
        }
        Ok(())
    }

    pub fn endpoints(&self, edge: usize, reds: &[Point], blues: &[Point]) -> (Point, Point) {
        let (a, b) = self.edges[edge];
        match self.kind {
            MatchingKind::OneColor => (reds[a], reds[b]),
            _ => (reds[a], blues[b]),
        }
    }

    pub fn edge_length(&self, edge: usize, reds: &[Point], blues: &[Point]) -> f64 {
        let (p, q) = self.endpoints(edge, reds, blues);
        p.dist(q)
    }

    /// Sum of Euclidean edge lengths, accumulated in edge order.
    pub fn total_length(&self, reds: &[Point], blues: &[Point]) -> f64 {
        (0..self.edges.len()).map(|e| self.edge_length(e, reds, blues)).sum()
    }

    pub fn segments(&self, reds: &[Point], blues: &[Point]) -> Result<Vec<Segment>> {
        (0..self.edges.len())
            .map(|e| {
                let (p, q) = self.endpoints(e, reds, blues);
                Segment::new(p, q)
            })
            .collect()
    }

    /// Partner blue of each red (bipartite kinds).
    pub fn red_partners(&self, n_red: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n_red];
        for &(r, b) in &self.edges {
            out[r] = Some(b);
        }
        out
    }

    pub fn blue_partners(&self, n_blue: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n_blue];
        for &(r, b) in &self.edges {
            out[b] = Some(r);
        }
        out
    }

    pub fn unmatched_counts(&self, n_red: usize, n_blue: usize) -> (usize, usize) {
        match self.kind {
            MatchingKind::OneColor => (n_red - 2 * self.edges.len(), n_blue),
            _ => (n_red - self.edges.len(), n_blue - self.edges.len()),
        }
    }
}

fn dist_matrix(rows: &[Point], cols: &[Point], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for (i, r) in rows.iter().enumerate() {
        for (j, b) in cols.iter().enumerate() {
            c[i * n + j] = r.dist(*b);
        }
    }
    c
}

/// Minimum-length perfect matching of equal-size sets.
pub fn min_cost_perfect(reds: &[Point], blues: &[Point]) -> Result<Matching> {
    if reds.len() != blues.len() {
        return Err(Error::SizeMismatch { reds: reds.len(), blues: blues.len() });
    }
    let n = reds.len();
    let lap = lap::solve(n, &dist_matrix(reds, blues, n), EPS_TIE).ok_or(Error::Infeasible)?;
    Ok(Matching::new(
        MatchingKind::Perfect,
        lap.row_to_col.into_iter().enumerate().collect(),
    ))
}

/// Exhaustive minimum over all `n!` permutations; the first permutation in
/// lexicographic order among those within [`EPS_TIE`] of the minimum.
pub fn brute_force_min(reds: &[Point], blues: &[Point]) -> Result<Matching> {
    if reds.len() != blues.len() {
        return Err(Error::SizeMismatch { reds: reds.len(), blues: blues.len() });
    }
    let n = reds.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { n, limit: BRUTE_FORCE_LIMIT });
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for perm in (0..n).permutations(n) {
        let cost: f64 = perm.iter().enumerate().map(|(i, &j)| reds[i].dist(blues[j])).sum();
        if best.as_ref().is_none_or(|(c, _)| cost < c - EPS_TIE) {
            best = Some((cost, perm));
        }
    }
    let perm = best.map(|(_, p)| p).unwrap_or_default();
    Ok(Matching::new(MatchingKind::Perfect, perm.into_iter().enumerate().collect()))
}

/// Minimum-length partial matching in which every blue point is matched.
///
/// Reduced to a square problem by adding `|reds| - |blues|` zero-cost
/// dummy blues.
pub fn min_cost_all_blue(reds: &[Point], blues: &[Point]) -> Result<Matching> {
    if reds.len() < blues.len() {
        return Err(Error::SizeMismatch { reds: reds.len(), blues: blues.len() });
    }
    let n = reds.len();
    let mut c = vec![0.0; n * n];
    for (i, r) in reds.iter().enumerate() {
        for (j, b) in blues.iter().enumerate() {
            c[i * n + j] = r.dist(*b);
        }
    }
    let lap = lap::solve(n, &c, EPS_TIE).ok_or(Error::Infeasible)?;
    let edges = lap
        .row_to_col
        .into_iter()
        .enumerate()
        .filter(|&(_, j)| j < blues.len())
        .collect();
    Ok(Matching::new(MatchingKind::Partial, edges))
}

/// Minimum-length matching among those of maximum cardinality, whichever
/// color is in the majority.
pub fn min_cost_max_cardinality(reds: &[Point], blues: &[Point]) -> Matching {
    if reds.len() >= blues.len() {
        min_cost_all_blue(reds, blues).expect("size precondition holds")
    } else {
        let flipped = min_cost_all_blue(blues, reds).expect("size precondition holds");
        Matching::new(
            MatchingKind::Partial,
            flipped.edges.into_iter().map(|(b, r)| (r, b)).collect(),
        )
    }
}

/// Minimum-length matching that covers every required point, using only
/// pairs accepted by `allowed`. Points not marked required may stay
/// unmatched. Returns [`Error::Infeasible`] when no such matching exists.
///
/// Reduced to a square assignment of size `|reds| + |blues|`: each point
/// gets a private zero-cost "stay unmatched" slot if it is optional, and
/// leftover slots pair with each other for free.
pub fn min_cost_covering<F>(
    reds: &[Point],
    blues: &[Point],
    red_required: &[bool],
    blue_required: &[bool],
    allowed: F,
) -> Result<Matching>
where
    F: Fn(usize, usize) -> bool,
{
    let (nr, nb) = (reds.len(), blues.len());
    if red_required.len() != nr || blue_required.len() != nb {
        return Err(Error::InvalidParameter("required mask length mismatch".into()));
    }
    let n = nr + nb;
    let inf = f64::INFINITY;
    let mut c = vec![inf; n * n];
    // Rows: reds, then blue slots. Columns: blues, then red slots.
    for i in 0..nr {
        for j in 0..nb {
            if allowed(i, j) {
                c[i * n + j] = reds[i].dist(blues[j]);
            }
        }
        if !red_required[i] {
            c[i * n + nb + i] = 0.0;
        }
    }
    for k in 0..nb {
        let row = nr + k;
        if !blue_required[k] {
            c[row * n + k] = 0.0;
        }
        for i in 0..nr {
            c[row * n + nb + i] = 0.0;
        }
    }
    let lap = lap::solve(n, &c, EPS_TIE).ok_or(Error::Infeasible)?;
    let edges = lap
        .row_to_col
        .into_iter()
        .take(nr)
        .enumerate()
        .filter(|&(_, j)| j < nb)
        .collect();
    Ok(Matching::new(MatchingKind::Partial, edges))
}

/// A pair of edges whose partner swap shortens the matching.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    pub first: usize,
    pub second: usize,
    pub gain: f64,
}

/// First edge pair, in scan order, with
/// `|r - b'| + |r' - b| < |r - b| + |r' - b'| - EPS_TIE`.
pub fn improvable_pair(m: &Matching, reds: &[Point], blues: &[Point]) -> Option<Improvement> {
    if m.kind == MatchingKind::OneColor {
        return None;
    }
    for i in 0..m.edges.len() {
        let (ri, bi) = m.edges[i];
        for j in (i + 1)..m.edges.len() {
            let (rj, bj) = m.edges[j];
            let before = reds[ri].dist(blues[bi]) + reds[rj].dist(blues[bj]);
            let after = reds[ri].dist(blues[bj]) + reds[rj].dist(blues[bi]);
            if after < before - EPS_TIE {
                return Some(Improvement { first: i, second: j, gain: before - after });
            }
        }
    }
    None
}
