//! Property verifiers and estimators: planarity, arc disjointness, the
//! Poisson tail bound, mean edge length, region crossings and per-box
//! rematching.

use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::{min_cost_perfect, Matching, MatchingKind, EPS_TIE};
use crate::geometry::{edge_crosses_region, segments_intersect, Domain, Point, Rect, Region, Segment};
use crate::point_process::{stream_rng, ColoredPointSet};
use crate::walk::{arc_intersections, ArcSpec};
use crate::{Error, Result};

/// Evidence attached to a failed check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    EdgePair { first: usize, second: usize },
    Subset { edges: Vec<usize>, excess: f64 },
    Value { at: f64, expected: f64, found: f64 },
    Block { stage: usize, level: usize, node: usize, detail: String },
    Point { color: String, index: usize, detail: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub property: String,
    pub trials: usize,
    pub violations: Vec<Witness>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(property: &str, trials: usize) -> Self {
        Self { property: property.to_string(), trials, violations: Vec::new(), pass: true }
    }

    /// Sets `pass` from the violation list.
    pub fn finish(mut self) -> Self {
        self.pass = self.violations.is_empty();
        self
    }
}

fn bbox(s: &Segment) -> (f64, f64, f64, f64) {
    (s.a.x.min(s.b.x), s.a.x.max(s.b.x), s.a.y.min(s.b.y), s.a.y.max(s.b.y))
}

/// Pairs of segments that meet, by a sweep over x-extents.
pub fn intersecting_pairs(segs: &[Segment]) -> Vec<(usize, usize)> {
    let boxes: Vec<_> = segs.iter().map(bbox).collect();
    let mut order: Vec<usize> = (0..segs.len()).collect();
    order.sort_by(|&i, &j| boxes[i].0.total_cmp(&boxes[j].0));
    let mut out = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            if boxes[j].0 > boxes[i].1 {
                break;
            }
            if boxes[j].2 > boxes[i].3 || boxes[i].2 > boxes[j].3 {
                continue;
            }
            // Collinear overlap also counts as meeting.
            if segments_intersect(&segs[i], &segs[j]).unwrap_or(true) {
                out.push((i.min(j), i.max(j)));
            }
        }
    }
    out.sort_unstable();
    out
}

/// All-pairs scan for intersecting edges of a strip or plane matching.
pub fn check_planarity(m: &Matching, ps: &ColoredPointSet) -> Result<VerificationReport> {
    if matches!(ps.domain, Domain::Line { .. }) {
        return Err(Error::WrongDomain { expected: "strip or plane", found: "line" });
    }
    let segs = m.segments(&ps.reds, &ps.blues)?;
    let mut report = VerificationReport::new("planarity", 1);
    report.violations = intersecting_pairs(&segs)
        .into_iter()
        .map(|(first, second)| Witness::EdgePair { first, second })
        .collect();
    Ok(report.finish())
}

pub fn check_arc_disjointness(arcs: &[ArcSpec]) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("arc_disjointness", 1);
    report.violations = arc_intersections(arcs)?
        .into_iter()
        .map(|(first, second)| Witness::EdgePair { first, second })
        .collect();
    Ok(report.finish())
}

/// Means of `X, X'` (`lambda`) and `Y` (`mu`), with `0 < mu <= lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernoffParams {
    pub lambda: f64,
    pub mu: f64,
}

impl ChernoffParams {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        let p = Self { lambda, mu };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite() && self.lambda.is_finite()) || self.mu > self.lambda {
            return Err(Error::InvalidParameter(format!(
                "need 0 < mu <= lambda, got mu = {}, lambda = {}",
                self.mu, self.lambda
            )));
        }
        Ok(())
    }
}

/// `exp(-mu^2 / (6 lambda))`, an upper bound on `P(X - X' >= Y)`.
pub fn chernoff_bound(p: &ChernoffParams) -> Result<f64> {
    p.check()?;
    Ok((-p.mu * p.mu / (6.0 * p.lambda)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernoffEstimate {
    pub params: ChernoffParams,
    pub trials: usize,
    pub hits: usize,
    pub estimate: f64,
    /// Binomial standard error of `estimate`.
    pub sigma: f64,
    pub bound: f64,
    /// `estimate <= bound + 3 sigma`.
    pub pass: bool,
}

const MC_CHUNK: usize = 4096;

/// Monte Carlo frequency of `X - X' >= Y`. Trials run in chunks of 4096,
/// chunk `c` drawing from stream `c` of `seed`, so the result does not
/// depend on the thread count.
pub fn chernoff_mc(p: &ChernoffParams, trials: usize, seed: u64) -> Result<ChernoffEstimate> {
    let bound = chernoff_bound(p)?;
    if trials < 10_000 {
        return Err(Error::InvalidParameter(format!("{trials} trials, need at least 10000")));
    }
    let x = Poisson::new(p.lambda).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let y = Poisson::new(p.mu).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let chunks = trials.div_ceil(MC_CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let n = MC_CHUNK.min(trials - c * MC_CHUNK);
            (0..n)
                .filter(|_| {
                    let a: f64 = x.sample(&mut rng);
                    let b: f64 = x.sample(&mut rng);
                    let c: f64 = y.sample(&mut rng);
                    a - b >= c
                })
                .count()
        })
        .sum();
    let estimate = hits as f64 / trials as f64;
    let sigma = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok(ChernoffEstimate {
        params: *p,
        trials,
        hits,
        estimate,
        sigma,
        bound,
        pass: estimate <= bound + 3.0 * sigma,
    })
}

/// Mean, maximum and tail counts of a list of crossing counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountSummary {
    pub samples: usize,
    pub mean: f64,
    pub max: usize,
    /// `(k, number of samples with count >= k)` for `k = 1, 2, 4, 8, ...`.
    pub tail: Vec<(usize, usize)>,
}

pub fn summarize_counts(counts: &[usize]) -> CountSummary {
    let max = counts.iter().copied().max().unwrap_or(0);
    let mean = if counts.is_empty() {
        0.0
    } else {
        counts.iter().sum::<usize>() as f64 / counts.len() as f64
    };
    let mut tail = Vec::new();
    let mut k = 1;
    while k <= max.max(1) {
        tail.push((k, counts.iter().filter(|&&c| c >= k).count()));
        k *= 2;
    }
    CountSummary { samples: counts.len(), mean, max, tail }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct StatsReport {
    /// Mean over samples of the total edge length from reds in `S` per
    /// unit area of `S`.
    pub eta_hat: Option<f64>,
    pub eta_per_sample: Vec<f64>,
    pub window_areas: Vec<f64>,
    pub crossing_counts: Vec<usize>,
    pub crossing_summary: Option<CountSummary>,
}

/// One windowed matching together with its interior subwindow `S`.
pub struct EtaSample<'a> {
    pub points: &'a ColoredPointSet,
    pub matching: &'a Matching,
    pub interior: Rect,
}

fn eta_single(s: &EtaSample) -> Result<f64> {
    let partners = s.matching.red_partners(s.points.reds.len());
    let mut total = 0.0;
    for (i, r) in s.points.reds.iter().enumerate() {
        if !s.interior.contains(*r) {
            continue;
        }
        let Some(j) = partners[i] else {
            return Err(Error::InvalidMatching(format!("red {i} inside S is unmatched")));
        };
        let other = if s.matching.kind == MatchingKind::OneColor {
            s.points.reds[j]
        } else {
            s.points.blues[j]
        };
        total += r.dist(other);
    }
    Ok(total / s.interior.area())
}

/// Empirical mean edge length per unit area, averaged over samples.
pub fn estimate_eta(samples: &[EtaSample]) -> Result<StatsReport> {
    let per: Vec<f64> = samples.iter().map(eta_single).collect::<Result<_>>()?;
    let eta_hat = (!per.is_empty()).then(|| per.iter().sum::<f64>() / per.len() as f64);
    Ok(StatsReport {
        eta_hat,
        eta_per_sample: per,
        window_areas: samples.iter().map(|s| s.points.domain.window().area()).collect(),
        ..StatsReport::default()
    })
}

/// Number of edges whose closed segment meets each region.
pub fn crossing_stats(m: &Matching, ps: &ColoredPointSet, regions: &[Region]) -> Result<StatsReport> {
    let segs = m.segments(&ps.reds, &ps.blues)?;
    let counts: Vec<usize> = regions
        .iter()
        .map(|r| segs.iter().filter(|s| edge_crosses_region(s, r)).count())
        .collect();
    Ok(StatsReport {
        crossing_summary: Some(summarize_counts(&counts)),
        crossing_counts: counts,
        window_areas: vec![ps.domain.window().area()],
        ..StatsReport::default()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RematchReport {
    pub box_side: f64,
    pub before: f64,
    pub after: f64,
    pub improvement: f64,
    pub rematched_edges: usize,
    pub untouched_edges: usize,
    pub matching: Matching,
}

/// Cuts the window into `t x t` squares anchored at its lower-left corner
/// and replaces the edges lying entirely inside each square by the
/// minimum-length matching of their endpoints.
pub fn box_rematch_experiment(m: &Matching, ps: &ColoredPointSet, t: f64) -> Result<RematchReport> {
    if !matches!(ps.domain, Domain::Plane { .. }) {
        return Err(Error::WrongDomain { expected: "plane", found: ps.domain.name() });
    }
    if m.kind == MatchingKind::OneColor {
        return Err(Error::InvalidMatching("box rematching needs a two-color matching".into()));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("box side {t}")));
    }
    let w = ps.domain.window();
    let cell = |p: Point| (((p.x - w.x0) / t).floor() as i64, ((p.y - w.y0) / t).floor() as i64);
    let mut groups: std::collections::BTreeMap<(i64, i64), Vec<usize>> = Default::default();
    let mut kept = Vec::new();
    for (e, &(r, b)) in m.edges.iter().enumerate() {
        let (cr, cb) = (cell(ps.reds[r]), cell(ps.blues[b]));
        if cr == cb {
            groups.entry(cr).or_default().push(e);
        } else {
            kept.push((r, b));
        }
    }
    let untouched_edges = kept.len();
    let mut edges = kept;
    for idx in groups.values() {
        let reds: Vec<usize> = idx.iter().map(|&e| m.edges[e].0).collect();
        let blues: Vec<usize> = idx.iter().map(|&e| m.edges[e].1).collect();
        let rp: Vec<Point> = reds.iter().map(|&i| ps.reds[i]).collect();
        let bp: Vec<Point> = blues.iter().map(|&i| ps.blues[i]).collect();
        let best = min_cost_perfect(&rp, &bp)?;
        let current: f64 = rp.iter().zip(&bp).map(|(a, b)| a.dist(*b)).sum();
        if best.total_length(&rp, &bp) < current - EPS_TIE {
            edges.extend(best.edges.iter().map(|&(i, j)| (reds[i], blues[j])));
        } else {
            edges.extend(reds.iter().copied().zip(blues.iter().copied()));
        }
    }
    let matching = Matching::new(m.kind, edges);
    let before = m.total_length(&ps.reds, &ps.blues);
    let after = matching.total_length(&ps.reds, &ps.blues);
    Ok(RematchReport {
        box_side: t,
        before,
        after,
        improvement: before - after,
        rematched_edges: m.len() - untouched_edges,
        untouched_edges,
        matching,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::min_cost_perfect;
    use crate::point_process::sample_fixed;

    fn square() -> ColoredPointSet {
        let d = Domain::plane(Rect::new(-1.0, 2.0, -1.0, 2.0).unwrap()).unwrap();
        ColoredPointSet::new(
            d,
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)],
            vec![Point::new(0.0, 1.0), Point::new(1.0, 1.0)],
            0,
        )
        .unwrap()
    }

    #[test]
    fn planarity_examples() {
        let ps = square();
        let crossed = Matching::new(MatchingKind::Perfect, vec![(0, 1), (1, 0)]);
        let rep = check_planarity(&crossed, &ps).unwrap();
        assert_eq!(rep.violations, vec![Witness::EdgePair { first: 0, second: 1 }]);
        assert!(!rep.pass);
        let empty = Matching::empty(MatchingKind::Perfect);
        assert!(check_planarity(&empty, &ps).unwrap().pass);

        let d = Domain::plane(Rect::new(0.0, 1.0, 0.0, 1.0).unwrap()).unwrap();
        let ps = sample_fixed(d, 100, 100, 1).unwrap();
        let m = min_cost_perfect(&ps.reds, &ps.blues).unwrap();
        assert!(check_planarity(&m, &ps).unwrap().pass);
    }

    #[test]
    fn sweep_matches_all_pairs() {
        let d = Domain::plane(Rect::new(0.0, 1.0, 0.0, 1.0).unwrap()).unwrap();
        let ps = sample_fixed(d, 30, 30, 2).unwrap();
        let m = Matching::new(MatchingKind::Perfect, (0..30).map(|i| (i, 29 - i)).collect());
        let segs = m.segments(&ps.reds, &ps.blues).unwrap();
        let mut brute = Vec::new();
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                if segments_intersect(&segs[i], &segs[j]).unwrap() {
                    brute.push((i, j));
                }
            }
        }
        assert_eq!(intersecting_pairs(&segs), brute);
    }

    #[test]
    fn chernoff_spot_values() {
        let b = chernoff_bound(&ChernoffParams::new(6.0, 6.0).unwrap()).unwrap();
        assert!((b - (-1.0f64).exp()).abs() < 1e-6);
        assert!((b - 0.367879).abs() < 1e-6);
        let b = chernoff_bound(&ChernoffParams::new(10.0, 5.0).unwrap()).unwrap();
        assert!((b - 0.659241).abs() < 1e-6);
        let b = chernoff_bound(&ChernoffParams::new(1.0, 1e-8).unwrap()).unwrap();
        assert!((b - 1.0).abs() < 1e-12);
        assert!(ChernoffParams::new(1.0, 2.0).is_err());
        assert!(chernoff_bound(&ChernoffParams { lambda: 1.0, mu: 2.0 }).is_err());
    }

    #[test]
    fn chernoff_mc_respects_bound() {
        for (l, m) in [(10.0, 5.0), (1.0, 1.0), (0.01, 0.01)] {
            let p = ChernoffParams::new(l, m).unwrap();
            let est = chernoff_mc(&p, 100_000, 3).unwrap();
            assert!(est.pass, "{est:?}");
        }
        let p = ChernoffParams::new(1.0, 1.0).unwrap();
        assert_eq!(chernoff_mc(&p, 20_000, 9).unwrap(), chernoff_mc(&p, 20_000, 9).unwrap());
        assert!(chernoff_mc(&p, 100, 9).is_err());
    }

    #[test]
    fn chernoff_mc_against_exact_tail() {
        // P(X - X' >= Y) for lambda = mu = 1, by direct summation of the
        // Poisson masses.
        let pmf = |mean: f64, k: usize| {
            let mut p = (-mean).exp();
            for i in 1..=k {
                p *= mean / i as f64;
            }
            p
        };
        let mut exact = 0.0;
        for x in 0..40 {
            for xp in 0..40 {
                for y in 0..40 {
                    if x as i64 - xp as i64 >= y as i64 {
                        exact += pmf(1.0, x) * pmf(1.0, xp) * pmf(1.0, y);
                    }
                }
            }
        }
        let est = chernoff_mc(&ChernoffParams::new(1.0, 1.0).unwrap(), 200_000, 5).unwrap();
        assert!((est.estimate - exact).abs() < 4.0 * est.sigma, "{} vs {exact}", est.estimate);
    }

    #[test]
    fn eta_examples() {
        let d = Domain::plane(Rect::new(0.0, 3.0, 0.0, 3.0).unwrap()).unwrap();
        let ps = ColoredPointSet::new(d, vec![Point::new(1.5, 1.5)], vec![Point::new(2.5, 1.5)], 0).unwrap();
        let m = Matching::new(MatchingKind::Perfect, vec![(0, 0)]);
        let s = Rect::new(1.0, 2.0, 1.0, 2.0).unwrap();
        let rep = estimate_eta(&[EtaSample { points: &ps, matching: &m, interior: s }]).unwrap();
        assert_eq!(rep.eta_hat, Some(1.0));
        let s = Rect::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let rep = estimate_eta(&[EtaSample { points: &ps, matching: &m, interior: s }]).unwrap();
        assert_eq!(rep.eta_hat, Some(0.0));
    }

    #[test]
    fn eta_is_translation_covariant() {
        let d = Domain::plane(Rect::new(0.0, 10.0, 0.0, 10.0).unwrap()).unwrap();
        let ps = sample_fixed(d, 100, 100, 4).unwrap();
        let m = min_cost_perfect(&ps.reds, &ps.blues).unwrap();
        let s = Rect::new(2.5, 7.5, 2.5, 7.5).unwrap();
        let base = estimate_eta(&[EtaSample { points: &ps, matching: &m, interior: s }]).unwrap();
        let (dx, dy) = (3.25, -7.5);
        let moved = ColoredPointSet {
            domain: Domain::plane(d.window().translate(dx, dy)).unwrap(),
            seed: ps.seed,
            reds: ps.reds.iter().map(|p| p.translate(dx, dy)).collect(),
            blues: ps.blues.iter().map(|p| p.translate(dx, dy)).collect(),
        };
        let shifted =
            estimate_eta(&[EtaSample { points: &moved, matching: &m, interior: s.translate(dx, dy) }]).unwrap();
        assert!((base.eta_hat.unwrap() - shifted.eta_hat.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn crossing_counts() {
        let d = Domain::plane(Rect::new(-3.0, 3.0, -3.0, 3.0).unwrap()).unwrap();
        let ps = ColoredPointSet::new(d, vec![Point::new(-2.0, 0.0)], vec![Point::new(2.0, 0.0)], 0).unwrap();
        let m = Matching::new(MatchingKind::Perfect, vec![(0, 0)]);
        let regions = [
            Region::Disk { center: Point::new(0.0, 0.0), radius: 1.0 },
            Region::Disk { center: Point::new(0.0, 2.5), radius: 1.0 },
        ];
        let rep = crossing_stats(&m, &ps, &regions).unwrap();
        assert_eq!(rep.crossing_counts, vec![1, 0]);
        let s = rep.crossing_summary.unwrap();
        assert_eq!((s.max, s.mean), (1, 0.5));
    }

    #[test]
    fn rematch_square_gain() {
        let ps = square();
        let crossed = Matching::new(MatchingKind::Perfect, vec![(0, 1), (1, 0)]);
        let rep = box_rematch_experiment(&crossed, &ps, 3.0).unwrap();
        assert!((rep.improvement - (2.0 * 2f64.sqrt() - 2.0)).abs() < 1e-9);
        assert_eq!(rep.untouched_edges, 0);
        let good = min_cost_perfect(&ps.reds, &ps.blues).unwrap();
        let rep = box_rematch_experiment(&good, &ps, 3.0).unwrap();
        assert_eq!(rep.improvement, 0.0);
        assert_eq!(rep.matching, good);
    }

    #[test]
    fn rematch_keeps_boundary_edges() {
        let d = Domain::plane(Rect::new(0.0, 12.0, 0.0, 12.0).unwrap()).unwrap();
        let ps = sample_fixed(d, 144, 144, 8).unwrap();
        let m = Matching::new(MatchingKind::Perfect, (0..144).map(|i| (i, (i * 7) % 144)).collect());
        let rep = box_rematch_experiment(&m, &ps, 4.0).unwrap();
        assert!(rep.after <= rep.before + 1e-9);
        let cell = |p: Point| ((p.x / 4.0).floor(), (p.y / 4.0).floor());
        for &(r, b) in &m.edges {
            if cell(ps.reds[r]) != cell(ps.blues[b]) {
                assert!(rep.matching.edges.contains(&(r, b)));
            }
        }
        rep.matching.validate(144, 144).unwrap();
    }
}
