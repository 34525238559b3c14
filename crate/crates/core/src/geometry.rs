//! Planar geometry on `f64` coordinates.
//!
//! Orientation tests use a relative tolerance: the cross product
//! `(q - p) x (r - p)` is treated as zero when its magnitude is at most
//! [`EPS_GEOM`] times `|q - p| * |r - p|`, i.e. when the sine of the angle
//! at `p` is below `EPS_GEOM`. Random real inputs are never that close to
//! degenerate except with negligible probability, so a collinear overlap
//! is reported as an error rather than resolved.
//!
//! Rectangles are half-open `[x0, x1) x [y0, y1)` for membership. Crossing
//! queries treat the region as closed, and segments are always closed.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Relative tolerance for orientation predicates.
pub const EPS_GEOM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    pub fn translate(self, dx: f64, dy: f64) -> Point {
        Point::new(self.x + dx, self.y + dy)
    }

    fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Lexicographic order by `x`, then `y`.
    pub fn lex_cmp(&self, other: &Point) -> std::cmp::Ordering {
        self.x.total_cmp(&other.x).then(self.y.total_cmp(&other.y))
    }
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point::new(v[0], v[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

fn cross(u: Point, v: Point) -> f64 {
    u.x * v.y - u.y * v.x
}

/// Sign of the orientation of `r` relative to the directed line `p -> q`;
/// `0` when within tolerance.
pub fn orientation(p: Point, q: Point, r: Point) -> i8 {
    let u = q.sub(p);
    let v = r.sub(p);
    let det = cross(u, v);
    let scale = u.norm() * v.norm();
    if det.abs() <= EPS_GEOM * scale {
        0
    } else if det > 0.0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Result<Self> {
        if a == b {
            return Err(Error::DegenerateSegment(a.x, a.y));
        }
        Ok(Self { a, b })
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    /// Closest distance from `p` to the closed segment.
    pub fn dist_to_point(&self, p: Point) -> f64 {
        let d = self.b.sub(self.a);
        let len2 = d.x * d.x + d.y * d.y;
        let t = ((p.x - self.a.x) * d.x + (p.y - self.a.y) * d.y) / len2;
        let t = t.clamp(0.0, 1.0);
        p.dist(Point::new(self.a.x + t * d.x, self.a.y + t * d.y))
    }
}

// `p` is known to be collinear with `s`; test whether it lies within the
// segment's bounding box.
fn on_segment(s: &Segment, p: Point) -> bool {
    let tol = EPS_GEOM * s.length().max(1.0);
    p.x >= s.a.x.min(s.b.x) - tol
        && p.x <= s.a.x.max(s.b.x) + tol
        && p.y >= s.a.y.min(s.b.y) - tol
        && p.y <= s.a.y.max(s.b.y) + tol
}

/// Whether the closed segments share at least one point.
///
/// Returns [`Error::CollinearOverlap`] when the segments are collinear and
/// overlap along a sub-segment of positive length; that cannot happen for
/// parallel-free inputs.
pub fn segments_intersect(s1: &Segment, s2: &Segment) -> Result<bool> {
    let o1 = orientation(s1.a, s1.b, s2.a);
    let o2 = orientation(s1.a, s1.b, s2.b);
    let o3 = orientation(s2.a, s2.b, s1.a);
    let o4 = orientation(s2.a, s2.b, s1.b);

    if o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0 {
        return collinear_overlap(s1, s2);
    }
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return Ok(true);
    }
    Ok((o1 == 0 && on_segment(s1, s2.a))
        || (o2 == 0 && on_segment(s1, s2.b))
        || (o3 == 0 && on_segment(s2, s1.a))
        || (o4 == 0 && on_segment(s2, s1.b)))
}

fn collinear_overlap(s1: &Segment, s2: &Segment) -> Result<bool> {
    let d = s1.b.sub(s1.a);
    let len2 = d.x * d.x + d.y * d.y;
    let param = |p: Point| ((p.x - s1.a.x) * d.x + (p.y - s1.a.y) * d.y) / len2;
    let (mut lo, mut hi) = (param(s2.a), param(s2.b));
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let lo = lo.max(0.0);
    let hi = hi.min(1.0);
    let tol = EPS_GEOM;
    if hi < lo - tol {
        Ok(false)
    } else if hi - lo <= tol {
        Ok(true)
    } else {
        Err(Error::CollinearOverlap)
    }
}

/// Half-open axis-aligned rectangle `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        let finite = [x0, x1, y0, y1].iter().all(|v| v.is_finite());
        if !finite || x0 >= x1 || y0 >= y1 {
            return Err(Error::InvalidRect { x0, x1, y0, y1 });
        }
        Ok(Self { x0, x1, y0, y1 })
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x < self.x1 && p.y >= self.y0 && p.y < self.y1
    }

    pub fn contains_closed(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x0 >= self.x0 && other.x1 <= self.x1 && other.y0 >= self.y0 && other.y1 <= self.y1
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Rect {
        Rect { x0: self.x0 + dx, x1: self.x1 + dx, y0: self.y0 + dy, y1: self.y1 + dy }
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    /// Concentric sub-rectangle scaled by `factor` in each linear dimension.
    pub fn scaled_about_center(&self, factor: f64) -> Result<Rect> {
        let c = self.center();
        let hw = 0.5 * factor * self.width();
        let hh = 0.5 * factor * self.height();
        Rect::new(c.x - hw, c.x + hw, c.y - hh, c.y + hh)
    }
}

/// A query region for crossing counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Region {
    Rect(Rect),
    Disk { center: Point, radius: f64 },
}

/// Whether the closed segment meets the closed region.
pub fn edge_crosses_region(s: &Segment, region: &Region) -> bool {
    match region {
        Region::Disk { center, radius } => s.dist_to_point(*center) <= *radius,
        Region::Rect(r) => segment_meets_closed_rect(s, r),
    }
}

// Liang-Barsky clipping of the parametrised segment against the closed box.
fn segment_meets_closed_rect(s: &Segment, r: &Rect) -> bool {
    let dx = s.b.x - s.a.x;
    let dy = s.b.y - s.a.y;
    let mut t0 = 0.0_f64;
    let mut t1 = 1.0_f64;
    let checks = [
        (-dx, s.a.x - r.x0),
        (dx, r.x1 - s.a.x),
        (-dy, s.a.y - r.y0),
        (dy, r.y1 - s.a.y),
    ];
    for (p, q) in checks {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let t = q / p;
            if p < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

/// Whether no two distinct unordered pairs of points span parallel vectors.
///
/// Exhaustive `O(n^4)` scan; pairs sharing a point are included, so three
/// collinear points also make the set non-parallel-free.
pub fn is_parallel_free(points: &[Point]) -> bool {
    let mut dirs = Vec::with_capacity(points.len() * points.len().saturating_sub(1) / 2);
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            dirs.push(points[j].sub(points[i]));
        }
    }
    for a in 0..dirs.len() {
        for b in (a + 1)..dirs.len() {
            let (u, v) = (dirs[a], dirs[b]);
            if cross(u, v).abs() <= EPS_GEOM * u.norm() * v.norm() {
                return false;
            }
        }
    }
    true
}

/// The region on which a point configuration lives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// Window `[x0, x1)` of the real line; points carry `y = 0`.
    Line { x0: f64, x1: f64 },
    /// Window `[x0, x1) x [0, 1)` of the strip.
    Strip { x0: f64, x1: f64 },
    /// Rectangular window of the plane.
    Plane { window: Rect },
}

impl Domain {
    pub fn line(x0: f64, x1: f64) -> Result<Self> {
        Rect::new(x0, x1, 0.0, 1.0)?;
        Ok(Domain::Line { x0, x1 })
    }

    pub fn strip(x0: f64, x1: f64) -> Result<Self> {
        Rect::new(x0, x1, 0.0, 1.0)?;
        Ok(Domain::Strip { x0, x1 })
    }

    pub fn plane(window: Rect) -> Result<Self> {
        let window = Rect::new(window.x0, window.x1, window.y0, window.y1)?;
        Ok(Domain::Plane { window })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Domain::Line { .. } => "line",
            Domain::Strip { .. } => "strip",
            Domain::Plane { .. } => "plane",
        }
    }

    /// Bounding rectangle; the line and strip use the unit-height band.
    pub fn window(&self) -> Rect {
        match *self {
            Domain::Line { x0, x1 } | Domain::Strip { x0, x1 } => {
                Rect { x0, x1, y0: 0.0, y1: 1.0 }
            }
            Domain::Plane { window } => window,
        }
    }

    /// Lebesgue measure of the window (length for the line).
    pub fn measure(&self) -> f64 {
        match *self {
            Domain::Line { x0, x1 } | Domain::Strip { x0, x1 } => x1 - x0,
            Domain::Plane { window } => window.area(),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        match self {
            Domain::Line { x0, x1 } => p.y == 0.0 && p.x >= *x0 && p.x < *x1,
            _ => self.window().contains(p),
        }
    }

    /// Validated copy; rejects empty or non-finite windows.
    pub fn validated(&self) -> Result<Self> {
        let w = self.window();
        let ok = Rect::new(w.x0, w.x1, w.y0, w.y1).is_ok();
        if !ok || !(self.measure() > 0.0) {
            return Err(Error::EmptyWindow);
        }
        Ok(*self)
    }
}
