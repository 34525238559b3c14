//! Seeded sampling of red/blue point configurations.
//!
//! Every random stream is a ChaCha8 generator keyed by a 64-bit master
//! seed and a 64-bit stream index, so Monte Carlo trial `i` of a sweep
//! with master seed `s` always sees the same numbers no matter which
//! thread runs it.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::geometry::{Domain, Point, Rect};
use crate::{Error, Result};

/// Generator for stream `index` under `master`.
pub fn stream_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// A 64-bit seed derived from `(master, index)`, for APIs that take a seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    stream_rng(master, index).next_u64()
}

/// Red and blue points on a domain window. Both lists are sorted by `x`,
/// ties by `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColoredPointSet {
    pub domain: Domain,
    pub seed: u64,
    pub reds: Vec<Point>,
    pub blues: Vec<Point>,
}

impl ColoredPointSet {
    /// Builds a configuration from explicit points, sorting them and
    /// checking window membership and simplicity.
    pub fn new(domain: Domain, mut reds: Vec<Point>, mut blues: Vec<Point>, seed: u64) -> Result<Self> {
        let domain = domain.validated()?;
        for p in reds.iter().chain(&blues) {
            if !p.x.is_finite() || !p.y.is_finite() || !domain.contains(*p) {
                return Err(Error::OutsideWindow(p.x, p.y));
            }
        }
        reds.sort_by(Point::lex_cmp);
        blues.sort_by(Point::lex_cmp);
        let mut all: Vec<Point> = reds.iter().chain(&blues).copied().collect();
        all.sort_by(Point::lex_cmp);
        if let Some(w) = all.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(format!(
                "duplicate point ({}, {})",
                w[0].x, w[0].y
            )));
        }
        Ok(Self { domain, seed, reds, blues })
    }

    /// Points on the line given by their coordinates.
    pub fn on_line(x0: f64, x1: f64, reds: &[f64], blues: &[f64]) -> Result<Self> {
        let to_pts = |xs: &[f64]| xs.iter().map(|&x| Point::new(x, 0.0)).collect();
        Self::new(Domain::line(x0, x1)?, to_pts(reds), to_pts(blues), 0)
    }

    /// Points on the strip given as `(x, y)` pairs.
    pub fn on_strip(x0: f64, x1: f64, reds: &[(f64, f64)], blues: &[(f64, f64)]) -> Result<Self> {
        let to_pts = |v: &[(f64, f64)]| v.iter().map(|&(x, y)| Point::new(x, y)).collect();
        Self::new(Domain::strip(x0, x1)?, to_pts(reds), to_pts(blues), 0)
    }

    pub fn len(&self) -> usize {
        self.reds.len() + self.blues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reds.is_empty() && self.blues.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub lambda_red: f64,
    pub lambda_blue: f64,
    pub domain: Domain,
    pub seed: u64,
}

impl SampleConfig {
    pub fn unit(domain: Domain, seed: u64) -> Self {
        Self { lambda_red: 1.0, lambda_blue: 1.0, domain, seed }
    }
}

fn uniform_points<R: Rng>(rng: &mut R, domain: &Domain, n: usize) -> Vec<Point> {
    let w = domain.window();
    let mut pts: Vec<Point> = (0..n)
        .map(|_| {
            let x = rng.random_range(w.x0..w.x1);
            let y = match domain {
                Domain::Line { .. } => 0.0,
                _ => rng.random_range(w.y0..w.y1),
            };
            Point::new(x, y)
        })
        .collect();
    pts.sort_by(Point::lex_cmp);
    pts
}

fn poisson_count<R: Rng>(rng: &mut R, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive finite mean");
    let k: f64 = dist.sample(rng);
    k as usize
}

/// Independent Poisson processes of the configured intensities on the
/// window. Reds use stream 0 of the seed and blues stream 1.
pub fn sample(config: &SampleConfig) -> Result<ColoredPointSet> {
    let domain = config.domain.validated()?;
    for lambda in [config.lambda_red, config.lambda_blue] {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidIntensity(lambda));
        }
    }
    let measure = domain.measure();
    let mut red_rng = stream_rng(config.seed, 0);
    let n_red = poisson_count(&mut red_rng, config.lambda_red * measure);
    let reds = uniform_points(&mut red_rng, &domain, n_red);
    let mut blue_rng = stream_rng(config.seed, 1);
    let n_blue = poisson_count(&mut blue_rng, config.lambda_blue * measure);
    let blues = uniform_points(&mut blue_rng, &domain, n_blue);
    Ok(ColoredPointSet { domain, seed: config.seed, reds, blues })
}

/// Exactly `n_red` and `n_blue` i.i.d. uniform points (the binomial
/// process), used where a perfect matching of the whole window is needed.
pub fn sample_fixed(domain: Domain, n_red: usize, n_blue: usize, seed: u64) -> Result<ColoredPointSet> {
    let domain = domain.validated()?;
    let reds = uniform_points(&mut stream_rng(seed, 0), &domain, n_red);
    let blues = uniform_points(&mut stream_rng(seed, 1), &domain, n_blue);
    Ok(ColoredPointSet { domain, seed, reds, blues })
}

/// `#reds - #blues` inside the half-open rectangle.
pub fn count_diff(ps: &ColoredPointSet, rect: &Rect) -> i64 {
    let reds = ps.reds.iter().filter(|p| rect.contains(**p)).count() as i64;
    let blues = ps.blues.iter().filter(|p| rect.contains(**p)).count() as i64;
    reds - blues
}
