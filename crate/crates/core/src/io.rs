//! Versioned JSON files and CSV tables.
//!
//! Every JSON document carries a top-level `"format": 1` next to the
//! fields of its body; reading rejects any other version.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::assignment::Matching;
use crate::hierarchy::{BlockSystem, LevelDiagnostics};
use crate::point_process::ColoredPointSet;
use crate::verify::VerificationReport;
use crate::walk::ArcSpec;
use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format: u32,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct EnvelopeRef<'a, T> {
    format: u32,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON with the format field and a trailing newline.
pub fn to_json<T: Serialize>(body: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&EnvelopeRef { format: FORMAT_VERSION, body })?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    match value.get("format").and_then(|v| v.as_u64()) {
        Some(v) if v == u64::from(FORMAT_VERSION) => {}
        Some(v) => return Err(Error::Format(format!("unsupported format version {v}"))),
        None => return Err(Error::Format("missing \"format\" field".into())),
    }
    let env: Envelope<T> = serde_json::from_str(text)?;
    Ok(env.body)
}

pub fn write_json<T: Serialize>(path: &Path, body: &T) -> Result<()> {
    std::fs::write(path, to_json(body)?)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    from_json(&std::fs::read_to_string(path)?)
}

pub fn write_csv<S: Serialize>(path: &Path, rows: &[S]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string<S: Serialize>(rows: &[S]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

/// Registered constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Construction {
    ZeroBlock,
    OneColor,
    CutTime,
    Excursion,
    MinCost,
    Hierarchical,
    Laminate,
}

impl Construction {
    pub fn name(&self) -> &'static str {
        match self {
            Construction::ZeroBlock => "zero_block",
            Construction::OneColor => "one_color",
            Construction::CutTime => "cut_time",
            Construction::Excursion => "excursion",
            Construction::MinCost => "min_cost",
            Construction::Hierarchical => "hierarchical",
            Construction::Laminate => "laminate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyInfo {
    pub block_seed: u64,
    pub system: BlockSystem,
    pub diagnostics: Vec<LevelDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub cost: f64,
    pub oracle_cost: f64,
    pub agree: bool,
}

/// A construction's output together with the points it matches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchingFile {
    pub construction: Construction,
    pub points: ColoredPointSet,
    pub matching: Matching,
    pub total_length: f64,
    pub unresolved_reds: usize,
    pub unresolved_blues: usize,
    #[serde(default)]
    pub boundaries: Vec<f64>,
    #[serde(default)]
    pub arcs: Option<Vec<ArcSpec>>,
    #[serde(default)]
    pub hierarchy: Option<HierarchyInfo>,
    #[serde(default)]
    pub oracle: Option<OracleCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub reports: Vec<VerificationReport>,
    pub pass: bool,
}

impl ReportFile {
    pub fn new(reports: Vec<VerificationReport>) -> Self {
        let pass = reports.iter().all(|r| r.pass);
        Self { reports, pass }
    }
}
