//! Factorial block hierarchy and the staged matching built on it.
//!
//! With `a_n = n!`, an `n`-block is an `a_n x a_{n-1}` rectangle for even
//! `n` and `a_{n-1} x a_n` for odd `n`. Even blocks split into
//! `a_n / a_{n-2}` children side by side, odd blocks into children stacked
//! bottom to top; the first child (left-most or bottom-most) is the heir.
//! Grid offsets are `t_n = r_n a_{n-2} + t_{n-2}` with `t_0 = t_1 = 0` and
//! `r_n` uniform in `[0, a_n / a_{n-2})`.
//!
//! The window is a single `N`-block, the one containing the unit square
//! `[0,1)^2`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::{min_cost_covering, min_cost_max_cardinality, Matching, MatchingKind};
use crate::geometry::{Domain, Point, Rect};
use crate::point_process::{stream_rng, ColoredPointSet};
use crate::verify::{VerificationReport, Witness};
use crate::{Error, Result};

/// Largest supported top level; `12!` still fits comfortably in `i64`.
pub const MAX_LEVEL: usize = 12;

pub fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// Integer half-open rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IRect {
    pub x0: i64,
    pub x1: i64,
    pub y0: i64,
    pub y1: i64,
}

impl IRect {
    pub fn width(&self) -> i64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> i64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> i64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.to_rect().contains(p)
    }

    pub fn contains_rect(&self, o: &IRect) -> bool {
        self.x0 <= o.x0 && o.x1 <= self.x1 && self.y0 <= o.y0 && o.y1 <= self.y1
    }

    pub fn to_rect(&self) -> Rect {
        Rect { x0: self.x0 as f64, x1: self.x1 as f64, y0: self.y0 as f64, y1: self.y1 as f64 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSystem {
    /// Top level `N`.
    pub levels: usize,
    /// `a[n] = n!` for `n = 0..=N`.
    pub a: Vec<i64>,
    /// `r[n]` for `n = 0..=N`; `r[0] = r[1] = 0`.
    pub r: Vec<i64>,
    pub t: Vec<i64>,
}

impl BlockSystem {
    /// A system with the given offsets `r[0..=N]`.
    pub fn with_offsets(levels: usize, r: Vec<i64>) -> Result<Self> {
        if levels < 2 {
            return Err(Error::InvalidParameter(format!("top level {levels} below 2")));
        }
        if levels > MAX_LEVEL {
            return Err(Error::TooLarge { n: levels, limit: MAX_LEVEL });
        }
        if r.len() != levels + 1 {
            return Err(Error::InvalidParameter(format!("expected {} offsets", levels + 1)));
        }
        let a: Vec<i64> = (0..=levels).map(factorial).collect();
        for n in 0..=levels {
            let limit = if n < 2 { 1 } else { a[n] / a[n - 2] };
            if !(0..limit).contains(&r[n]) {
                return Err(Error::InvalidParameter(format!("r[{n}] = {} outside [0, {limit})", r[n])));
            }
        }
        let mut t = vec![0i64; levels + 1];
        for n in 2..=levels {
            t[n] = r[n] * a[n - 2] + t[n - 2];
        }
        Ok(Self { levels, a, r, t })
    }

    /// `(width, height)` of an `n`-block.
    pub fn block_dims(&self, n: usize) -> (i64, i64) {
        if n % 2 == 0 {
            (self.a[n], self.a[n - 1])
        } else {
            (self.a[n - 1], self.a[n])
        }
    }

    fn grid_offsets(&self, n: usize) -> (i64, i64) {
        if n % 2 == 0 {
            (self.t[n], self.t[n - 1])
        } else {
            (self.t[n - 1], self.t[n])
        }
    }

    /// The `n`-block containing `p`.
    pub fn block_at(&self, n: usize, p: Point) -> IRect {
        let (w, h) = self.block_dims(n);
        let (ox, oy) = self.grid_offsets(n);
        let ix = ((p.x - ox as f64) / w as f64).floor() as i64;
        let iy = ((p.y - oy as f64) / h as f64).floor() as i64;
        let (x0, y0) = (ox + ix * w, oy + iy * h);
        IRect { x0, x1: x0 + w, y0, y1: y0 + h }
    }

    /// The top-level block containing `[0,1)^2`.
    pub fn window(&self) -> IRect {
        self.block_at(self.levels, Point::new(0.5, 0.5))
    }

    /// Left-most child of an even block, bottom-most child of an odd one.
    pub fn heir_of(&self, level: usize, block: &IRect) -> Result<IRect> {
        if level < 2 || level > self.levels {
            return Err(Error::InvalidParameter(format!("heir of a level-{level} block")));
        }
        if *block != self.block_at(level, Point::new(block.x0 as f64 + 0.5, block.y0 as f64 + 0.5)) {
            return Err(Error::InvalidParameter(format!("{block:?} is not a level-{level} block")));
        }
        Ok(self.block_at(level - 1, Point::new(block.x0 as f64 + 0.5, block.y0 as f64 + 0.5)))
    }

    /// Whether the `n`-block containing `p` is the heir of its
    /// `(n+1)`-block. Needs `n < N`.
    pub fn in_heir(&self, n: usize, p: Point) -> bool {
        let parent = self.block_at(n + 1, p);
        self.heir_of(n + 1, &parent).expect("parent is a block").contains(p)
    }

    /// Number of levels `n in 1..N` at which the `n`-block containing `p`
    /// is an heir.
    pub fn heirs_containing(&self, p: Point) -> usize {
        (1..self.levels).filter(|&n| self.in_heir(n, p)).count()
    }
}

/// Offsets drawn from stream 0 of `seed`.
pub fn build_block_system(seed: u64, levels: usize) -> Result<BlockSystem> {
    if !(2..=MAX_LEVEL).contains(&levels) {
        return BlockSystem::with_offsets(levels, Vec::new());
    }
    let mut rng = stream_rng(seed, 0);
    let r = (0..=levels)
        .map(|n| if n < 2 { 0 } else { rng.random_range(0..factorial(n) / factorial(n - 2)) })
        .collect();
    BlockSystem::with_offsets(levels, r)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockNode {
    pub level: usize,
    pub rect: IRect,
    pub parent: Option<usize>,
    /// Ordered left to right (even level) or bottom to top (odd level), so
    /// `children[0]` is the heir.
    pub children: Vec<usize>,
}

/// The blocks of every level inside the window, built by subdivision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockTree {
    pub nodes: Vec<BlockNode>,
    /// Node ids per level; `by_level[0]` is empty.
    pub by_level: Vec<Vec<usize>>,
    pub root: usize,
}

impl BlockTree {
    pub fn build(system: &BlockSystem) -> Self {
        let top = system.levels;
        let mut nodes = vec![BlockNode { level: top, rect: system.window(), parent: None, children: Vec::new() }];
        let mut by_level = vec![Vec::new(); top + 1];
        by_level[top].push(0);
        for n in (2..=top).rev() {
            let parents = by_level[n].clone();
            for p in parents {
                let rect = nodes[p].rect;
                let (cw, ch) = system.block_dims(n - 1);
                let count = system.a[n] / system.a[n - 2];
                for k in 0..count {
                    let child = if n % 2 == 0 {
                        IRect { x0: rect.x0 + k * cw, x1: rect.x0 + (k + 1) * cw, y0: rect.y0, y1: rect.y1 }
                    } else {
                        IRect { x0: rect.x0, x1: rect.x1, y0: rect.y0 + k * ch, y1: rect.y0 + (k + 1) * ch }
                    };
                    let id = nodes.len();
                    nodes.push(BlockNode { level: n - 1, rect: child, parent: Some(p), children: Vec::new() });
                    nodes[p].children.push(id);
                    by_level[n - 1].push(id);
                }
            }
        }
        Self { nodes, by_level, root: 0 }
    }

    pub fn heir(&self, node: usize) -> Option<usize> {
        self.nodes[node].children.first().copied()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Which block of each level holds each point, and the reverse lists.
struct Membership {
    /// `red_node[n][i]`: id of the `n`-block holding red `i`.
    red_node: Vec<Vec<usize>>,
    blue_node: Vec<Vec<usize>>,
    node_reds: Vec<Vec<usize>>,
    node_blues: Vec<Vec<usize>>,
}

fn membership(tree: &BlockTree, ps: &ColoredPointSet) -> Membership {
    let top = tree.nodes[tree.root].level;
    let w = tree.nodes[tree.root].rect;
    let mut grid = vec![usize::MAX; w.area() as usize];
    for &leaf in &tree.by_level[1] {
        let r = tree.nodes[leaf].rect;
        grid[((r.y0 - w.y0) * w.width() + (r.x0 - w.x0)) as usize] = leaf;
    }
    let locate = |pts: &[Point]| -> Vec<Vec<usize>> {
        let mut per_level = vec![Vec::new(); top + 1];
        for p in pts {
            let cx = (p.x.floor() as i64) - w.x0;
            let cy = (p.y.floor() as i64) - w.y0;
            let mut node = grid[(cy * w.width() + cx) as usize];
            for slot in per_level.iter_mut().skip(1) {
                slot.push(node);
                node = tree.nodes[node].parent.unwrap_or(node);
            }
        }
        per_level
    };
    let red_node = locate(&ps.reds);
    let blue_node = locate(&ps.blues);
    let mut node_reds = vec![Vec::new(); tree.len()];
    let mut node_blues = vec![Vec::new(); tree.len()];
    for level in 1..=top {
        for (i, &n) in red_node[level].iter().enumerate() {
            node_reds[n].push(i);
        }
        for (i, &n) in blue_node[level].iter().enumerate() {
            node_blues[n].push(i);
        }
    }
    Membership { red_node, blue_node, node_reds, node_blues }
}

/// Partner arrays of the current partial matching.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageState {
    pub red_partner: Vec<Option<usize>>,
    pub blue_partner: Vec<Option<usize>>,
}

impl StageState {
    pub fn empty(n_red: usize, n_blue: usize) -> Self {
        Self { red_partner: vec![None; n_red], blue_partner: vec![None; n_blue] }
    }

    pub fn matching(&self) -> Matching {
        Matching::new(
            MatchingKind::Partial,
            self.red_partner.iter().enumerate().filter_map(|(r, b)| b.map(|b| (r, b))).collect(),
        )
    }

    fn link(&mut self, r: usize, b: usize) {
        self.red_partner[r] = Some(b);
        self.blue_partner[b] = Some(r);
    }
}

/// Result of one stage in one block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockOutcome {
    pub node: usize,
    pub bad: bool,
    pub dodgy: bool,
    pub new_edges: Vec<(usize, usize)>,
    /// Points that lost their partner in step (i).
    pub unmatched_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSnapshot {
    pub stage: usize,
    pub state: StageState,
    pub blocks: Vec<BlockOutcome>,
}

pub struct Hierarchy<'a> {
    pub points: &'a ColoredPointSet,
    pub system: BlockSystem,
    pub tree: BlockTree,
    members: Membership,
}

impl<'a> Hierarchy<'a> {
    /// Requires a plane configuration whose window is the system's window.
    pub fn new(points: &'a ColoredPointSet, system: BlockSystem) -> Result<Self> {
        let Domain::Plane { window } = points.domain else {
            return Err(Error::WrongDomain { expected: "plane", found: points.domain.name() });
        };
        if window != system.window().to_rect() {
            return Err(Error::InvalidParameter(format!(
                "window {window:?} is not the top-level block {:?}",
                system.window()
            )));
        }
        let tree = BlockTree::build(&system);
        let members = membership(&tree, points);
        Ok(Self { points, system, tree, members })
    }

    pub fn reds_in(&self, node: usize) -> &[usize] {
        &self.members.node_reds[node]
    }

    pub fn blues_in(&self, node: usize) -> &[usize] {
        &self.members.node_blues[node]
    }

    pub fn red_block(&self, level: usize, red: usize) -> usize {
        self.members.red_node[level][red]
    }

    pub fn blue_block(&self, level: usize, blue: usize) -> usize {
        self.members.blue_node[level][blue]
    }

    fn match_max(&self, state: &mut StageState, reds: &[usize], blues: &[usize]) -> Vec<(usize, usize)> {
        let rp: Vec<Point> = reds.iter().map(|&i| self.points.reds[i]).collect();
        let bp: Vec<Point> = blues.iter().map(|&i| self.points.blues[i]).collect();
        let m = min_cost_max_cardinality(&rp, &bp);
        m.edges
            .iter()
            .map(|&(i, j)| {
                state.link(reds[i], blues[j]);
                (reds[i], blues[j])
            })
            .collect()
    }
}

/// Within every 1-block, the minimum-length matching among those of
/// maximum cardinality.
pub fn stage1(h: &Hierarchy) -> StageSnapshot {
    let mut state = StageState::empty(h.points.reds.len(), h.points.blues.len());
    let blocks = h.tree.by_level[1]
        .iter()
        .map(|&node| {
            let new_edges = h.match_max(&mut state, h.reds_in(node), h.blues_in(node));
            BlockOutcome { node, bad: false, dodgy: false, new_edges, unmatched_points: 0 }
        })
        .collect();
    StageSnapshot { stage: 1, state, blocks }
}

/// Steps (i)-(iii) of stage `n` for the `n`-block `node`:
///
/// 1. unmatch every point of the heir `B`;
/// 2. match every unmatched point of `A \ B` to unmatched points of
///    `(A \ B) ∪ C`, `C` the heir of `B` (`C = B` at stage 2), by minimum
///    length; the block is bad when this is impossible;
/// 3. among the points of `A` still unmatched, take the minimum-length
///    matching of maximum cardinality.
///
/// `unmatch_events` counts, per red then per blue, how often step (i)
/// removed a partner.
pub fn stage_n(
    h: &Hierarchy,
    state: &mut StageState,
    node: usize,
    unmatch_events: &mut (Vec<usize>, Vec<usize>),
) -> BlockOutcome {
    let n = h.tree.nodes[node].level;
    assert!(n >= 2, "stage_n needs a block of level at least 2");
    let b = h.tree.heir(node).expect("level >= 2 has children");
    let c = if n == 2 { b } else { h.tree.heir(b).expect("level >= 2 has children") };

    let mut unmatched_points = 0;
    for &r in h.reds_in(b) {
        if let Some(bl) = state.red_partner[r].take() {
            state.blue_partner[bl] = None;
            unmatch_events.0[r] += 1;
            unmatch_events.1[bl] += 1;
            unmatched_points += 2;
        }
    }
    for &bl in h.blues_in(b) {
        if let Some(r) = state.blue_partner[bl].take() {
            state.red_partner[r] = None;
            unmatch_events.0[r] += 1;
            unmatch_events.1[bl] += 1;
            unmatched_points += 2;
        }
    }

    let outside_b_red = |i: usize| h.red_block(n - 1, i) != b;
    let outside_b_blue = |i: usize| h.blue_block(n - 1, i) != b;
    let u_r: Vec<usize> =
        h.reds_in(node).iter().copied().filter(|&i| outside_b_red(i) && state.red_partner[i].is_none()).collect();
    let u_b: Vec<usize> =
        h.blues_in(node).iter().copied().filter(|&i| outside_b_blue(i) && state.blue_partner[i].is_none()).collect();
    let c_r: Vec<usize> = h.reds_in(c).to_vec();
    let c_b: Vec<usize> = h.blues_in(c).to_vec();

    let mut new_edges = Vec::new();
    let feasible = u_r.len() <= u_b.len() + c_b.len() && u_b.len() <= u_r.len() + c_r.len();
    let mut bad = !feasible;
    if feasible {
        let reds: Vec<usize> = u_r.iter().chain(&c_r).copied().collect();
        let blues: Vec<usize> = u_b.iter().chain(&c_b).copied().collect();
        let rp: Vec<Point> = reds.iter().map(|&i| h.points.reds[i]).collect();
        let bp: Vec<Point> = blues.iter().map(|&i| h.points.blues[i]).collect();
        let red_req: Vec<bool> = (0..reds.len()).map(|i| i < u_r.len()).collect();
        let blue_req: Vec<bool> = (0..blues.len()).map(|j| j < u_b.len()).collect();
        let (nur, nub) = (u_r.len(), u_b.len());
        match min_cost_covering(&rp, &bp, &red_req, &blue_req, |i, j| i < nur || j < nub) {
            Ok(m) => {
                for &(i, j) in &m.edges {
                    state.link(reds[i], blues[j]);
                    new_edges.push((reds[i], blues[j]));
                }
            }
            Err(_) => bad = true,
        }
    }

    let rest_r: Vec<usize> = h.reds_in(node).iter().copied().filter(|&i| state.red_partner[i].is_none()).collect();
    let rest_b: Vec<usize> = h.blues_in(node).iter().copied().filter(|&i| state.blue_partner[i].is_none()).collect();
    new_edges.extend(h.match_max(state, &rest_r, &rest_b));
    new_edges.sort_unstable();
    BlockOutcome { node, bad, dodgy: false, new_edges, unmatched_points }
}

/// True iff some child of `node` is bad.
pub fn classify_dodgy(tree: &BlockTree, bad: &[bool], node: usize) -> bool {
    tree.nodes[node].children.iter().any(|&c| bad[c])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelDiagnostics {
    pub level: usize,
    pub blocks: usize,
    pub bad_count: usize,
    pub dodgy_count: usize,
    /// Unmatched points lying in the heir of their `level`-block.
    pub heir_hits: usize,
    pub unmatched: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchicalRun {
    pub system: BlockSystem,
    pub tree: BlockTree,
    pub matching: Matching,
    pub stages: Vec<StageSnapshot>,
    /// Bad flag per tree node.
    pub bad: Vec<bool>,
    pub dodgy: Vec<bool>,
    pub unmatch_events_red: Vec<usize>,
    pub unmatch_events_blue: Vec<usize>,
    pub diagnostics: Vec<LevelDiagnostics>,
}

fn diagnostics_for(h: &Hierarchy, snap: &StageSnapshot, bad: &[bool], dodgy: &[bool]) -> LevelDiagnostics {
    let n = snap.stage;
    let nodes = &h.tree.by_level[n];
    let mut unmatched = 0;
    let mut heir_hits = 0;
    for &node in nodes {
        let heir = h.tree.heir(node);
        for &r in h.reds_in(node) {
            if snap.state.red_partner[r].is_none() {
                unmatched += 1;
                heir_hits += usize::from(heir.is_some_and(|b| h.red_block(n - 1, r) == b));
            }
        }
        for &bl in h.blues_in(node) {
            if snap.state.blue_partner[bl].is_none() {
                unmatched += 1;
                heir_hits += usize::from(heir.is_some_and(|b| h.blue_block(n - 1, bl) == b));
            }
        }
    }
    LevelDiagnostics {
        level: n,
        blocks: nodes.len(),
        bad_count: nodes.iter().filter(|&&k| bad[k]).count(),
        dodgy_count: nodes.iter().filter(|&&k| dodgy[k]).count(),
        heir_hits,
        unmatched,
    }
}

/// Runs stages `1..=N` over the window and records every intermediate
/// state.
pub fn run_hierarchical(ps: &ColoredPointSet, system: BlockSystem) -> Result<HierarchicalRun> {
    let h = Hierarchy::new(ps, system)?;
    let mut bad = vec![false; h.tree.len()];
    let mut dodgy = vec![false; h.tree.len()];
    let mut events = (vec![0; ps.reds.len()], vec![0; ps.blues.len()]);
    let first = stage1(&h);
    let mut diagnostics = vec![diagnostics_for(&h, &first, &bad, &dodgy)];
    let mut stages = vec![first];
    for n in 2..=h.system.levels {
        let mut state = stages.last().unwrap().state.clone();
        let mut blocks = Vec::new();
        for &node in &h.tree.by_level[n] {
            let mut out = stage_n(&h, &mut state, node, &mut events);
            out.dodgy = classify_dodgy(&h.tree, &bad, node);
            bad[node] = out.bad;
            dodgy[node] = out.dodgy;
            blocks.push(out);
        }
        let snap = StageSnapshot { stage: n, state, blocks };
        diagnostics.push(diagnostics_for(&h, &snap, &bad, &dodgy));
        stages.push(snap);
    }
    let matching = stages.last().unwrap().state.matching();
    Ok(HierarchicalRun {
        system: h.system.clone(),
        tree: h.tree.clone(),
        matching,
        stages,
        bad,
        dodgy,
        unmatch_events_red: events.0,
        unmatch_events_blue: events.1,
        diagnostics,
    })
}

/// Rechecks a run from its snapshots and the point coordinates alone.
///
/// After every stage `n` and for every `n`-block `A`: each edge lies in one
/// `n`-block; `A` has exactly `|reds(A) - blues(A)|` unmatched points; if
/// `n >= 2` and `A` is not bad, they all lie in the heir of `A`; if
/// `n >= 3` and `A` is neither bad nor dodgy, every edge added at this
/// stage has both ends in the heir of `A` or in heirs of its children.
/// Finally no point is unmatched more often than the number of heirs
/// containing it.
pub fn check_run(run: &HierarchicalRun, ps: &ColoredPointSet) -> VerificationReport {
    let mut report = VerificationReport::new("hierarchical_invariants", run.stages.len());
    let sys = &run.system;
    let block_of = |n: usize, p: Point| sys.block_at(n, p);
    let witness = |stage: usize, level: usize, node: usize, detail: String| Witness::Block {
        stage,
        level,
        node,
        detail,
    };

    let window = sys.window();
    for (n, ids) in run.tree.by_level.iter().enumerate().skip(1) {
        let area: i64 = ids.iter().map(|&k| run.tree.nodes[k].rect.area()).sum();
        let inside = ids.iter().all(|&k| {
            let r = run.tree.nodes[k].rect;
            window.contains_rect(&r) && r == block_of(n, Point::new(r.x0 as f64 + 0.5, r.y0 as f64 + 0.5))
        });
        if area != window.area() || !inside {
            report.violations.push(witness(0, n, run.tree.root, "blocks do not tile the window".into()));
        }
    }

    let mut previous: Option<&StageState> = None;
    for snap in &run.stages {
        let n = snap.stage;
        let st = &snap.state;
        for (r, b) in st.red_partner.iter().enumerate().filter_map(|(r, b)| b.map(|b| (r, b))) {
            if st.blue_partner[b] != Some(r) {
                report.violations.push(witness(n, n, 0, format!("partner arrays disagree at red {r}")));
            }
            if block_of(n, ps.reds[r]) != block_of(n, ps.blues[b]) {
                report.violations.push(witness(n, n, 0, format!("edge ({r}, {b}) leaves its {n}-block")));
            }
        }
        for &node in &run.tree.by_level[n] {
            let rect = run.tree.nodes[node].rect;
            let heir = (n >= 2).then(|| sys.heir_of(n, &rect).expect("tree block"));
            let reds: Vec<usize> = (0..ps.reds.len()).filter(|&i| rect.contains(ps.reds[i])).collect();
            let blues: Vec<usize> = (0..ps.blues.len()).filter(|&i| rect.contains(ps.blues[i])).collect();
            let loose: Vec<Point> = reds
                .iter()
                .filter(|&&i| st.red_partner[i].is_none())
                .map(|&i| ps.reds[i])
                .chain(blues.iter().filter(|&&i| st.blue_partner[i].is_none()).map(|&i| ps.blues[i]))
                .collect();
            let excess = (reds.len() as i64 - blues.len() as i64).unsigned_abs() as usize;
            if loose.len() != excess {
                report.violations.push(witness(
                    n,
                    n,
                    node,
                    format!("{} unmatched, excess {excess}", loose.len()),
                ));
            }
            if let Some(heir) = heir {
                if !run.bad[node] && loose.iter().any(|p| !heir.contains(*p)) {
                    report.violations.push(witness(n, n, node, "unmatched point outside the heir".into()));
                }
            }
            if n >= 3 && !run.bad[node] && !run.dodgy[node] {
                let heir = heir.expect("n >= 2");
                let child_heirs: Vec<IRect> = run.tree.nodes[node]
                    .children
                    .iter()
                    .map(|&c| sys.heir_of(n - 1, &run.tree.nodes[c].rect).expect("tree block"))
                    .collect();
                let confined = |p: Point| heir.contains(p) || child_heirs.iter().any(|h| h.contains(p));
                let prev = previous.expect("stage >= 2 has a predecessor");
                for &r in &reds {
                    if let Some(b) = st.red_partner[r] {
                        let fresh = prev.red_partner[r] != Some(b);
                        if fresh && !(confined(ps.reds[r]) && confined(ps.blues[b])) {
                            report.violations.push(witness(
                                n,
                                n,
                                node,
                                format!("new edge ({r}, {b}) not confined to heirs"),
                            ));
                        }
                    }
                }
            }
        }
        previous = Some(st);
    }

    for (color, pts, events) in [
        ("red", &ps.reds, &run.unmatch_events_red),
        ("blue", &ps.blues, &run.unmatch_events_blue),
    ] {
        for (i, p) in pts.iter().enumerate() {
            let heirs = sys.heirs_containing(*p);
            if events[i] > heirs {
                report.violations.push(Witness::Point {
                    color: color.into(),
                    index: i,
                    detail: format!("unmatched {} times, in {heirs} heirs", events[i]),
                });
            }
        }
    }
    report.finish()
}

/// Bound on the chance that the unit square lies in a bad `n`-block:
/// `2 exp(-(a_{n-2} a_{n-3})^2 / (6 (a_n a_{n-1} - a_{n-1} a_{n-2})))`.
pub fn bad_block_bound(n: usize) -> Result<f64> {
    if !(3..=MAX_LEVEL).contains(&n) {
        return Err(Error::InvalidParameter(format!("bad-block bound needs 3 <= n <= {MAX_LEVEL}")));
    }
    let a = |k: usize| factorial(k) as f64;
    let num = (a(n - 2) * a(n - 3)).powi(2);
    let den = 6.0 * (a(n) * a(n - 1) - a(n - 1) * a(n - 2));
    Ok(2.0 * (-num / den).exp())
}
