//! Finite-window constructions of two-color Poisson matchings and the
//! property checks that go with them.
//!
//! Red and blue points are sampled as independent Poisson processes on a
//! line, a strip `R x [0,1)` or a planar window. The crate builds the
//! walk-driven matchings on the line and strip (zero blocks, one-color
//! pairing, cut times, excursions with disjoint polygonal arcs), laminates
//! strips into the plane, runs the staged factorial block construction
//! that yields locally finite matchings, and verifies planarity,
//! minimality and the probability bounds against brute-force oracles.
//!
//! Module map:
//!
//! - [`geometry`]: points, segments, rectangles, intersection predicates.
//! - [`point_process`]: seeded Poisson sampling and the [`point_process::ColoredPointSet`].
//! - [`assignment`]: exact min-cost bipartite matching with a lexicographic tie rule.
//! - [`walk`]: the counting walk and every line/strip construction built on it.
//! - [`hierarchy`]: factorial blocks, heirs and the staged matching.
//! - [`verify`]: planarity/minimality verifiers, Chernoff bound, edge-length and crossing statistics.
//! - [`render`]: deterministic SVG output.
//! - [`io`]: versioned JSON file formats.
//! - [`cli`]: the `pmatch` command line.

pub mod assignment;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod hierarchy;
pub mod io;
pub mod point_process;
pub mod render;
pub mod verify;
pub mod walk;

pub use error::{Error, Result};
