//! Deterministic SVG output: points, edges, arcs, the walk below the strip
//! and block outlines with heirs highlighted.
//!
//! Coordinates go through a fixed affine map from the window to the
//! viewport (y pointing up) and are printed with three decimals, so equal
//! inputs give byte-identical files.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::assignment::{Matching, MatchingKind};
use crate::geometry::{Point, Rect};
use crate::hierarchy::BlockTree;
use crate::point_process::ColoredPointSet;
use crate::walk::{ArcSpec, StepWalk};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layers {
    pub points: bool,
    pub edges: bool,
    pub arcs: bool,
    pub walk: bool,
    pub blocks: bool,
}

impl Default for Layers {
    fn default() -> Self {
        Self { points: true, edges: true, arcs: true, walk: true, blocks: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderSpec {
    pub width: u32,
    pub height: u32,
    /// Height of the walk panel drawn under the main panel.
    pub walk_height: u32,
    pub layers: Layers,
    pub red: String,
    pub blue: String,
    pub edge: String,
    pub arc: String,
    pub block: String,
    pub heir: String,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self {
            width: 800,
            height: 400,
            walk_height: 160,
            layers: Layers::default(),
            red: "#c0392b".into(),
            blue: "#2471a3".into(),
            edge: "#333333".into(),
            arc: "#7d3c98".into(),
            block: "#999999".into(),
            heir: "#f5b041".into(),
        }
    }
}

/// What to draw; absent parts are skipped regardless of the layer flags.
pub struct Scene<'a> {
    pub points: &'a ColoredPointSet,
    pub matching: Option<&'a Matching>,
    pub arcs: Option<&'a [ArcSpec]>,
    pub walk: Option<&'a StepWalk>,
    pub blocks: Option<&'a BlockTree>,
}

struct Viewport {
    window: Rect,
    width: f64,
    height: f64,
    margin: f64,
}

impl Viewport {
    fn map(&self, p: Point) -> (f64, f64) {
        let sx = (self.width - 2.0 * self.margin) / self.window.width();
        let sy = (self.height - 2.0 * self.margin) / self.window.height();
        (
            self.margin + (p.x - self.window.x0) * sx,
            self.height - self.margin - (p.y - self.window.y0) * sy,
        )
    }
}

fn f(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

pub fn render_svg(scene: &Scene, spec: &RenderSpec) -> String {
    let layers = &spec.layers;
    let show_walk = layers.walk && scene.walk.is_some();
    let total_h = spec.height + if show_walk { spec.walk_height } else { 0 };
    let mut window = scene.points.domain.window();
    if window.height() == 0.0 {
        window.y1 = window.y0 + 1.0;
    }
    // Line domains have no vertical extent: centre the points.
    if matches!(scene.points.domain, crate::geometry::Domain::Line { .. }) {
        window.y0 = -0.5;
        window.y1 = 0.5;
    }
    let vp = Viewport { window, width: spec.width as f64, height: spec.height as f64, margin: 10.0 };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = spec.width,
        h = total_h
    );
    let (fx0, fy1) = vp.map(Point::new(window.x0, window.y0));
    let (fx1, fy0) = vp.map(Point::new(window.x1, window.y1));
    let _ = writeln!(
        out,
        r#"<rect class="frame" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        f(fx0),
        f(fy0),
        f(fx1 - fx0),
        f(fy1 - fy0)
    );

    if layers.blocks {
        if let Some(tree) = scene.blocks {
            let heirs: std::collections::BTreeSet<usize> =
                tree.nodes.iter().filter_map(|n| n.children.first().copied()).collect();
            let _ = writeln!(out, r#"<g class="blocks">"#);
            for (id, node) in tree.nodes.iter().enumerate() {
                let r = node.rect.to_rect();
                let (x0, y1) = vp.map(Point::new(r.x0, r.y0));
                let (x1, y0) = vp.map(Point::new(r.x1, r.y1));
                let heir = heirs.contains(&id);
                let (class, fill) = if heir {
                    ("block heir", format!("{}33", spec.heir))
                } else {
                    ("block", "none".to_string())
                };
                let _ = writeln!(
                    out,
                    r#"<rect class="{class} level-{}" x="{}" y="{}" width="{}" height="{}" fill="{fill}" stroke="{}" stroke-width="{}"/>"#,
                    node.level,
                    f(x0),
                    f(y0),
                    f(x1 - x0),
                    f(y1 - y0),
                    spec.block,
                    f(0.5 * node.level as f64)
                );
            }
            let _ = writeln!(out, "</g>");
        }
    }

    if layers.edges {
        if let Some(m) = scene.matching {
            let _ = writeln!(out, r#"<g class="edges">"#);
            for e in 0..m.len() {
                let (p, q) = m.endpoints(e, &scene.points.reds, &scene.points.blues);
                let ((x1, y1), (x2, y2)) = (vp.map(p), vp.map(q));
                let color = if m.kind == MatchingKind::OneColor { &spec.red } else { &spec.edge };
                let _ = writeln!(
                    out,
                    r#"<line class="edge" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}"/>"#,
                    f(x1),
                    f(y1),
                    f(x2),
                    f(y2)
                );
            }
            let _ = writeln!(out, "</g>");
        }
    }

    if layers.arcs {
        if let Some(arcs) = scene.arcs {
            let _ = writeln!(out, r#"<g class="arcs">"#);
            for a in arcs {
                let pts: Vec<String> = a
                    .vertices
                    .iter()
                    .map(|&v| {
                        let (x, y) = vp.map(v);
                        format!("{},{}", f(x), f(y))
                    })
                    .collect();
                let _ = writeln!(
                    out,
                    r#"<polyline class="arc" points="{}" fill="none" stroke="{}"/>"#,
                    pts.join(" "),
                    spec.arc
                );
            }
            let _ = writeln!(out, "</g>");
        }
    }

    if layers.points {
        let _ = writeln!(out, r#"<g class="points">"#);
        for (class, color, pts) in [
            ("red", &spec.red, &scene.points.reds),
            ("blue", &spec.blue, &scene.points.blues),
        ] {
            for p in pts.iter() {
                let (x, y) = vp.map(*p);
                let _ = writeln!(
                    out,
                    r#"<circle class="{class}" cx="{}" cy="{}" r="2.5" fill="{color}"/>"#,
                    f(x),
                    f(y)
                );
            }
        }
        let _ = writeln!(out, "</g>");
    }

    if show_walk {
        let walk = scene.walk.unwrap();
        let levels = walk.levels();
        let lo = *levels.iter().min().unwrap_or(&0) as f64;
        let hi = *levels.iter().max().unwrap_or(&0) as f64;
        let span = (hi - lo).max(1.0);
        let top = spec.height as f64 + 10.0;
        let panel = spec.walk_height as f64 - 20.0;
        let ymap = |v: i64| top + panel * (hi - v as f64) / span;
        let xmap = |x: f64| vp.map(Point::new(x, window.y0)).0;
        let mut pts = vec![(xmap(walk.x0), ymap(levels[0]))];
        for (k, j) in walk.jumps.iter().enumerate() {
            pts.push((xmap(j.x), ymap(levels[k])));
            pts.push((xmap(j.x), ymap(levels[k + 1])));
        }
        pts.push((xmap(walk.x1), ymap(*levels.last().unwrap())));
        let text: Vec<String> = pts.iter().map(|&(x, y)| format!("{},{}", f(x), f(y))).collect();
        let _ = writeln!(
            out,
            r#"<line class="walk-axis" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-dasharray="4 3"/>"#,
            f(xmap(walk.x0)),
            f(ymap(0)),
            f(xmap(walk.x1)),
            f(ymap(0)),
            spec.block
        );
        let _ = writeln!(
            out,
            r#"<polyline class="walk" points="{}" fill="none" stroke="black"/>"#,
            text.join(" ")
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Occurrences of `class="<class>` (prefix match on the class list).
pub fn count_class(svg: &str, class: &str) -> usize {
    let needle = format!("class=\"{class}");
    svg.match_indices(&needle)
        .filter(|(i, _)| {
            let rest = &svg[i + needle.len()..];
            rest.starts_with('"') || rest.starts_with(' ')
        })
        .count()
}
