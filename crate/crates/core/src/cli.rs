//! The `pmatch` command line.
//!
//! Exit codes: `0` when every check passes, `1` when a property is
//! violated, `2` for usage and configuration errors.
//!
//! A `--config` JSON file may supply any shared option (`seed`, `domain`,
//! `window`, `lambda_red`, `lambda_blue`, `construction`, `trials`,
//! `stages`, `k`, `count`); flags given on the command line take
//! precedence. There is no ambient randomness: a seed is required.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::{brute_force_min, improvable_pair, min_cost_max_cardinality, BRUTE_FORCE_LIMIT, EPS_TIE};
use crate::geometry::{Domain, Point, Rect, Region};
use crate::hierarchy::{build_block_system, check_run, run_hierarchical, BlockTree};
use crate::io::{self, Construction, HierarchyInfo, MatchingFile, OracleCheck, ReportFile};
use crate::point_process::{derive_seed, sample, sample_fixed, stream_rng, ColoredPointSet, SampleConfig};
use crate::render::{render_svg, Layers, RenderSpec, Scene};
use crate::verify::{
    check_arc_disjointness, check_planarity, chernoff_mc, crossing_stats, estimate_eta, ChernoffParams,
    EtaSample, StatsReport, VerificationReport, Witness,
};
use crate::walk::{self, build_walk, StripBand};
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "pmatch", version, about = "Two-color Poisson matchings on the line, strip and plane")]
pub struct Cli {
    /// JSON file with defaults for the shared options.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    Line,
    Strip,
    Plane,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub domain: Option<DomainKind>,
    /// `[x0, x1]` or `[x0, x1, y0, y1]`.
    pub window: Option<Vec<f64>>,
    pub lambda_red: Option<f64>,
    pub lambda_blue: Option<f64>,
    pub construction: Option<Construction>,
    pub trials: Option<usize>,
    pub stages: Option<usize>,
    pub k: Option<usize>,
    pub count: Option<usize>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Shared {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub domain: Option<DomainKind>,
    /// `x0,x1` (line, strip) or `x0,x1,y0,y1` (plane).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub window: Option<Vec<f64>>,
    #[arg(long)]
    pub lambda_red: Option<f64>,
    #[arg(long)]
    pub lambda_blue: Option<f64>,
    /// Exactly this many points of each color instead of Poisson counts.
    #[arg(long)]
    pub count: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a point configuration.
    Sample {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a construction and write the matching.
    Match {
        #[command(flatten)]
        shared: Shared,
        /// Point file; sampled from the shared options when absent.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, value_enum)]
        construction: Option<Construction>,
        /// Top level `N` of the block hierarchy.
        #[arg(long)]
        stages: Option<usize>,
        /// Use the shifted one-color pairing.
        #[arg(long)]
        coin: bool,
        /// Vertical shift for the lamination; drawn from the seed if absent.
        #[arg(long)]
        shift: Option<f64>,
        /// Cross-check min_cost against exhaustive search.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check properties of a matching file, or run the Poisson tail sweep.
    Verify {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "planarity")]
        check: Vec<Check>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV table for the chernoff sweep.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Edge-length and crossing statistics of a matching file.
    Stats {
        #[arg(long)]
        input: PathBuf,
        /// Query regions `disk:cx,cy,r` or `rect:x0,x1,y0,y1`.
        #[arg(long)]
        region: Vec<String>,
        /// Report the mean edge length over the central half-size subwindow.
        #[arg(long)]
        eta: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw a matching file as SVG.
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "points,edges,arcs,walk,blocks")]
        layers: Vec<String>,
        #[arg(long, default_value_t = 800)]
        width: u32,
        #[arg(long, default_value_t = 400)]
        height: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Seeded Monte Carlo sweeps written as CSV.
    Sweep {
        #[command(flatten)]
        shared: Shared,
        #[arg(long, value_enum)]
        kind: SweepKind,
        #[arg(long)]
        trials: Option<usize>,
        /// Window areas for the eta sweep.
        #[arg(long, value_delimiter = ',', default_value = "100,1000")]
        sizes: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Check {
    Planarity,
    Arcs,
    Minimality,
    TwoOpt,
    Hierarchy,
    Chernoff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum SweepKind {
    Chernoff,
    Eta,
}

/// Error carrying the exit code: usage errors exit 2.
#[derive(Debug)]
pub struct CliError(pub String);

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError(msg.into()))
}

struct Resolved {
    cfg: RunConfig,
}

impl Resolved {
    fn new(file: Option<&Path>, shared: &Shared) -> CliResult<Self> {
        let mut cfg = match file {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError(format!("{}: {e}", p.display())))?;
                serde_json::from_str::<RunConfig>(&text).map_err(|e| CliError(format!("{}: {e}", p.display())))?
            }
            None => RunConfig::default(),
        };
        macro_rules! over {
            ($($f:ident),*) => { $( if shared.$f.is_some() { cfg.$f = shared.$f.clone(); } )* };
        }
        over!(seed, domain, window, lambda_red, lambda_blue, count);
        Ok(Self { cfg })
    }

    fn seed(&self) -> CliResult<u64> {
        self.cfg.seed.ok_or_else(|| CliError("a seed is required (--seed or config)".into()))
    }

    fn domain(&self) -> CliResult<Domain> {
        let kind = self.cfg.domain.ok_or_else(|| CliError("--domain is required".into()))?;
        let w = self.cfg.window.clone().unwrap_or_else(|| match kind {
            DomainKind::Plane => vec![0.0, 10.0, 0.0, 10.0],
            _ => vec![0.0, 100.0],
        });
        let d = match (kind, w.as_slice()) {
            (DomainKind::Line, &[x0, x1]) => Domain::Line { x0, x1 },
            (DomainKind::Strip, &[x0, x1]) => Domain::Strip { x0, x1 },
            (DomainKind::Plane, &[x0, x1, y0, y1]) => Domain::Plane { window: Rect { x0, x1, y0, y1 } },
            _ => return usage(format!("window {w:?} does not fit a {kind:?} domain")),
        };
        Ok(d.validated()?)
    }

    fn sample_config(&self, domain: Domain) -> CliResult<SampleConfig> {
        Ok(SampleConfig {
            lambda_red: self.cfg.lambda_red.unwrap_or(1.0),
            lambda_blue: self.cfg.lambda_blue.unwrap_or(1.0),
            domain,
            seed: self.seed()?,
        })
    }

    fn sample_in(&self, domain: Domain) -> CliResult<ColoredPointSet> {
        let cfg = self.sample_config(domain)?;
        Ok(match self.cfg.count {
            Some(n) => sample_fixed(domain, n, n, cfg.seed)?,
            None => sample(&cfg)?,
        })
    }
}

/// Parses arguments, runs, and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` signals a property violation.
pub fn run(cli: Cli) -> CliResult<bool> {
    let config = cli.config.as_deref();
    match cli.command {
        Command::Sample { shared, out } => {
            let r = Resolved::new(config, &shared)?;
            let ps = r.sample_in(r.domain()?)?;
            io::write_json(&out, &ps)?;
            Ok(true)
        }
        Command::Match { shared, points, construction, stages, coin, shift, oracle, out } => {
            let mut r = Resolved::new(config, &shared)?;
            if construction.is_some() {
                r.cfg.construction = construction;
            }
            if stages.is_some() {
                r.cfg.stages = stages;
            }
            let file = cmd_match(&r, points.as_deref(), coin, shift, oracle)?;
            io::write_json(&out, &file)?;
            Ok(file.oracle.as_ref().is_none_or(|o| o.agree))
        }
        Command::Verify { shared, input, check, k, trials, out, csv } => {
            let mut r = Resolved::new(config, &shared)?;
            if k.is_some() {
                r.cfg.k = k;
            }
            if trials.is_some() {
                r.cfg.trials = trials;
            }
            cmd_verify(&r, input.as_deref(), &check, out.as_deref(), csv.as_deref())
        }
        Command::Stats { input, region, eta, out } => {
            let file: MatchingFile = io::read_json(&input)?;
            let regions = region.iter().map(|s| parse_region(s)).collect::<CliResult<Vec<_>>>()?;
            let mut report = if regions.is_empty() {
                StatsReport::default()
            } else {
                crossing_stats(&file.matching, &file.points, &regions)?
            };
            if eta {
                let w = file.points.domain.window();
                let interior = if matches!(file.points.domain, Domain::Line { .. }) {
                    let c = 0.5 * (w.x0 + w.x1);
                    let h = 0.25 * w.width();
                    Rect { x0: c - h, x1: c + h, y0: 0.0, y1: 1.0 }
                } else {
                    w.scaled_about_center(0.5)?
                };
                let e = estimate_eta(&[EtaSample { points: &file.points, matching: &file.matching, interior }])?;
                report.eta_hat = e.eta_hat;
                report.eta_per_sample = e.eta_per_sample;
                report.window_areas = e.window_areas;
            }
            io::write_json(&out, &report)?;
            Ok(true)
        }
        Command::Render { input, layers, width, height, out } => {
            let file: MatchingFile = io::read_json(&input)?;
            let svg = cmd_render(&file, &layers, width, height)?;
            std::fs::write(&out, svg).map_err(|e| CliError(e.to_string()))?;
            Ok(true)
        }
        Command::Sweep { shared, kind, trials, sizes, out } => {
            let mut r = Resolved::new(config, &shared)?;
            if trials.is_some() {
                r.cfg.trials = trials;
            }
            match kind {
                SweepKind::Chernoff => {
                    let rows = chernoff_sweep(r.seed()?, r.cfg.trials.unwrap_or(100_000))?;
                    io::write_csv(&out, &rows)?;
                    Ok(rows.iter().all(|row| row.pass))
                }
                SweepKind::Eta => {
                    let rows = eta_sweep(r.seed()?, r.cfg.trials.unwrap_or(10), &sizes)?;
                    io::write_csv(&out, &rows)?;
                    Ok(true)
                }
            }
        }
    }
}

fn parse_region(s: &str) -> CliResult<Region> {
    let (kind, rest) = s.split_once(':').ok_or_else(|| CliError(format!("region {s:?}: expected kind:values")))?;
    let v: Vec<f64> = rest
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| CliError(format!("region {s:?}: {e}")))?;
    match (kind, v.as_slice()) {
        ("disk", &[cx, cy, radius]) if radius > 0.0 => Ok(Region::Disk { center: Point::new(cx, cy), radius }),
        ("rect", &[x0, x1, y0, y1]) => Ok(Region::Rect(Rect::new(x0, x1, y0, y1)?)),
        _ => usage(format!("region {s:?} not understood")),
    }
}

fn load_or_sample(r: &Resolved, points: Option<&Path>) -> CliResult<ColoredPointSet> {
    match points {
        Some(p) => Ok(io::read_json(p)?),
        None => r.sample_in(r.domain()?),
    }
}

/// Seed of the block offsets, kept apart from the point streams.
pub fn block_seed(seed: u64) -> u64 {
    derive_seed(seed, 2)
}

fn cmd_match(
    r: &Resolved,
    points: Option<&Path>,
    coin: bool,
    shift: Option<f64>,
    oracle: bool,
) -> CliResult<MatchingFile> {
    let construction = r.cfg.construction.ok_or_else(|| CliError("--construction is required".into()))?;
    let file = |ps: ColoredPointSet, wm: walk::WindowedMatching| MatchingFile {
        construction,
        total_length: wm.matching.total_length(&ps.reds, &ps.blues),
        points: ps,
        matching: wm.matching,
        unresolved_reds: wm.unresolved_reds,
        unresolved_blues: wm.unresolved_blues,
        boundaries: wm.boundaries,
        arcs: None,
        hierarchy: None,
        oracle: None,
    };
    match construction {
        Construction::ZeroBlock => {
            let ps = load_or_sample(r, points)?;
            let wm = walk::zero_block_matching(&ps)?;
            Ok(file(ps, wm))
        }
        Construction::OneColor => {
            let ps = load_or_sample(r, points)?;
            let wm = walk::one_color_pairing(&ps, coin)?;
            Ok(file(ps, wm))
        }
        Construction::CutTime => {
            let ps = load_or_sample(r, points)?;
            let wm = walk::cut_time_matching(&ps)?;
            Ok(file(ps, wm))
        }
        Construction::Excursion => {
            let ps = load_or_sample(r, points)?;
            let wm = walk::excursion_matching(&ps)?;
            let arcs = match ps.domain {
                Domain::Strip { .. } => Some(walk::polygonal_arcs(&wm.matching, &ps)?),
                _ => None,
            };
            let mut f = file(ps, wm);
            f.arcs = arcs;
            Ok(f)
        }
        Construction::MinCost => {
            let ps = load_or_sample(r, points)?;
            let m = min_cost_max_cardinality(&ps.reds, &ps.blues);
            let check = if oracle {
                if ps.reds.len() != ps.blues.len() || ps.reds.len() > BRUTE_FORCE_LIMIT {
                    return usage(format!(
                        "--oracle needs equal color counts of at most {BRUTE_FORCE_LIMIT}, got {} and {}",
                        ps.reds.len(),
                        ps.blues.len()
                    ));
                }
                let cost = m.total_length(&ps.reds, &ps.blues);
                let oracle_cost = brute_force_min(&ps.reds, &ps.blues)?.total_length(&ps.reds, &ps.blues);
                Some(OracleCheck { cost, oracle_cost, agree: (cost - oracle_cost).abs() <= EPS_TIE })
            } else {
                None
            };
            let (ur, ub) = m.unmatched_counts(ps.reds.len(), ps.blues.len());
            let mut f = file(
                ps,
                walk::WindowedMatching { matching: m, unresolved_reds: 0, unresolved_blues: 0, boundaries: vec![] },
            );
            f.oracle = check;
            // Leftover points of the majority color are simply unmatched.
            f.unresolved_reds = ur;
            f.unresolved_blues = ub;
            Ok(f)
        }
        Construction::Hierarchical => {
            let seed = r.seed()?;
            let levels = r.cfg.stages.unwrap_or(4);
            let bseed = block_seed(seed);
            let system = build_block_system(bseed, levels)?;
            let ps = match points {
                Some(p) => io::read_json::<ColoredPointSet>(p)?,
                None => {
                    if let Some(k) = r.cfg.domain {
                        if k != DomainKind::Plane {
                            return usage(format!("hierarchical needs a plane domain, got {k:?}"));
                        }
                    }
                    r.sample_in(Domain::plane(system.window().to_rect())?)?
                }
            };
            let run = run_hierarchical(&ps, system)?;
            let (ur, ub) = run.matching.unmatched_counts(ps.reds.len(), ps.blues.len());
            let mut f = file(
                ps,
                walk::WindowedMatching {
                    matching: run.matching.clone(),
                    unresolved_reds: ur,
                    unresolved_blues: ub,
                    boundaries: vec![],
                },
            );
            f.hierarchy = Some(HierarchyInfo { block_seed: bseed, system: run.system, diagnostics: run.diagnostics });
            Ok(f)
        }
        Construction::Laminate => {
            if points.is_some() {
                return usage("laminate samples its own bands; --points is not accepted");
            }
            let seed = r.seed()?;
            let Domain::Plane { window } = r.domain()? else {
                return usage("laminate needs a plane domain");
            };
            let u = match shift {
                Some(u) => u,
                None => stream_rng(seed, 3).random_range(0.0..1.0),
            };
            let first = (window.y0 - u).floor() as i64;
            let last = (window.y1 - u).ceil() as i64;
            let bands = (first..last)
                .map(|i| {
                    let cfg = SampleConfig {
                        domain: Domain::strip(window.x0, window.x1)?,
                        seed: derive_seed(seed, 100 + (i - first) as u64),
                        ..r.sample_config(Domain::strip(window.x0, window.x1)?).map_err(|e| Error::InvalidParameter(e.0))?
                    };
                    let ps = sample(&cfg)?;
                    let wm = walk::excursion_matching(&ps)?;
                    let arcs = walk::polygonal_arcs(&wm.matching, &ps)?;
                    Ok(StripBand { points: ps, matching: wm.matching, arcs: Some(arcs) })
                })
                .collect::<crate::Result<Vec<_>>>()?;
            let lam = walk::laminate_strips(&bands, first, u)?;
            let (ur, ub) = lam.matching.unmatched_counts(lam.points.reds.len(), lam.points.blues.len());
            let mut f = file(
                lam.points,
                walk::WindowedMatching { matching: lam.matching, unresolved_reds: ur, unresolved_blues: ub, boundaries: vec![] },
            );
            f.arcs = Some(lam.arcs);
            Ok(f)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChernoffRow {
    pub lambda: f64,
    pub mu: f64,
    pub estimate: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `lambda in {1, 5, 10, 20}`, `mu in {lambda/4, lambda/2, lambda}`; grid
/// cell `i` uses stream seed `derive_seed(seed, i)`.
pub fn chernoff_sweep(seed: u64, trials: usize) -> crate::Result<Vec<ChernoffRow>> {
    let mut rows = Vec::new();
    let mut cell = 0;
    for lambda in [1.0, 5.0, 10.0, 20.0] {
        for frac in [0.25, 0.5, 1.0] {
            let p = ChernoffParams::new(lambda, lambda * frac)?;
            let est = chernoff_mc(&p, trials, derive_seed(seed, cell))?;
            cell += 1;
            rows.push(ChernoffRow { lambda, mu: p.mu, estimate: est.estimate, bound: est.bound, pass: est.pass });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaRow {
    pub trial: usize,
    pub area: usize,
    pub eta_hat: f64,
}

/// For each trial and area `A`: `A` red and `A` blue uniform points in a
/// square of area `A`, matched by minimum length, with `eta` measured on
/// the central square of half the side.
pub fn eta_sweep(seed: u64, trials: usize, sizes: &[usize]) -> crate::Result<Vec<EtaRow>> {
    let jobs: Vec<(usize, usize)> = (0..trials).flat_map(|t| sizes.iter().map(move |&a| (t, a))).collect();
    jobs.par_iter()
        .map(|&(trial, area)| {
            let side = (area as f64).sqrt();
            let window = Rect::new(0.0, side, 0.0, side)?;
            let ps = sample_fixed(Domain::plane(window)?, area, area, derive_seed(seed, trial as u64))?;
            let m = crate::assignment::min_cost_perfect(&ps.reds, &ps.blues)?;
            let interior = window.scaled_about_center(0.5)?;
            let rep = estimate_eta(&[EtaSample { points: &ps, matching: &m, interior }])?;
            Ok(EtaRow { trial, area, eta_hat: rep.eta_hat.unwrap_or(0.0) })
        })
        .collect()
}

fn cmd_verify(
    r: &Resolved,
    input: Option<&Path>,
    checks: &[Check],
    out: Option<&Path>,
    csv: Option<&Path>,
) -> CliResult<bool> {
    let file: Option<MatchingFile> = input.map(io::read_json).transpose()?;
    let need = |c: Check| -> CliResult<&MatchingFile> {
        file.as_ref().ok_or_else(|| CliError(format!("check {c:?} needs --input")))
    };
    let mut reports = Vec::new();
    for &c in checks {
        match c {
            Check::Planarity => {
                let f = need(c)?;
                reports.push(check_planarity(&f.matching, &f.points)?);
            }
            Check::Arcs => {
                let f = need(c)?;
                let arcs = f.arcs.as_ref().ok_or_else(|| CliError("matching file has no arcs".into()))?;
                reports.push(check_arc_disjointness(arcs)?);
            }
            Check::Minimality => {
                let f = need(c)?;
                let k = r.cfg.k.unwrap_or(4);
                let trials = r.cfg.trials.unwrap_or(1000);
                reports.push(walk::minimality_certificate_d1(&f.matching, &f.points, k, trials, r.seed()?)?);
            }
            Check::TwoOpt => {
                let f = need(c)?;
                let mut rep = VerificationReport::new("two_opt", 1);
                if let Some(imp) = improvable_pair(&f.matching, &f.points.reds, &f.points.blues) {
                    rep.violations.push(Witness::EdgePair { first: imp.first, second: imp.second });
                }
                reports.push(rep.finish());
            }
            Check::Hierarchy => {
                let f = need(c)?;
                let info = f.hierarchy.as_ref().ok_or_else(|| CliError("matching file has no hierarchy".into()))?;
                let run = run_hierarchical(&f.points, info.system.clone())?;
                let mut rep = check_run(&run, &f.points);
                if run.matching != f.matching {
                    rep.violations.push(Witness::Block {
                        stage: info.system.levels,
                        level: info.system.levels,
                        node: run.tree.root,
                        detail: "stored matching differs from the recomputed one".into(),
                    });
                }
                reports.push(rep.finish());
            }
            Check::Chernoff => {
                let trials = r.cfg.trials.unwrap_or(100_000);
                let rows = chernoff_sweep(r.seed()?, trials)?;
                if let Some(p) = csv {
                    io::write_csv(p, &rows)?;
                }
                let mut rep = VerificationReport::new("chernoff", trials);
                for row in rows.iter().filter(|row| !row.pass) {
                    rep.violations.push(Witness::Value { at: row.mu, expected: row.bound, found: row.estimate });
                }
                reports.push(rep.finish());
            }
        }
    }
    let report = ReportFile::new(reports);
    match out {
        Some(p) => io::write_json(p, &report)?,
        None => print!("{}", io::to_json(&report)?),
    }
    Ok(report.pass)
}

fn cmd_render(file: &MatchingFile, layer_names: &[String], width: u32, height: u32) -> CliResult<String> {
    let mut layers = Layers { points: false, edges: false, arcs: false, walk: false, blocks: false };
    for name in layer_names {
        match name.as_str() {
            "points" => layers.points = true,
            "edges" => layers.edges = true,
            "arcs" => layers.arcs = true,
            "walk" => layers.walk = true,
            "blocks" => layers.blocks = true,
            other => return usage(format!("unknown layer {other:?}")),
        }
    }
    let walk = match file.points.domain {
        Domain::Line { .. } | Domain::Strip { .. } if layers.walk => Some(build_walk(&file.points)?),
        _ => None,
    };
    let tree = file.hierarchy.as_ref().map(|h| BlockTree::build(&h.system));
    let scene = Scene {
        points: &file.points,
        matching: Some(&file.matching),
        arcs: file.arcs.as_deref(),
        walk: walk.as_ref(),
        blocks: tree.as_ref(),
    };
    let spec = RenderSpec { width, height, layers, ..RenderSpec::default() };
    Ok(render_svg(&scene, &spec))
}
