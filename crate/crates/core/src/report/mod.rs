//! CSV, JSON and SVG emitters.
//!
//! JSON output wraps every payload in a [`ReportDocument`] carrying a schema
//! version and run metadata. CSV output is the bare table. All emitters are
//! pure: identical inputs give byte-identical text.

mod svg;
mod tables;

use std::fmt;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ecosystem::{ComparisonRow, PopularityRanking};
use crate::lifecycle::LifecycleReport;
use crate::sota::{ActivityRow, SotaMapGrid};
use crate::{Error, Result};

pub use svg::{viridis, ActivitySvgStyle};
pub use tables::{
    activity_csv, cluster_csv, comparison_csv, descriptive_csv, gold_matches_csv, lifecycle_counts_csv,
    lifecycle_entries_csv, parse_errors_csv, polarity_conflicts_csv, popularity_csv, popularity_groups_csv, relative_improvements_csv,
    sota_map_csv, trajectories_csv,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
            Self::Svg => "svg",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "svg" => Ok(Self::Svg),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportKind {
    SotaMap,
    LifecycleMap,
    ActivityCounts,
    ClusterReport,
    PopularityReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    /// Left empty unless the caller pins a timestamp, so reruns stay byte-identical.
    pub generated_at: Option<String>,
    pub input_digest: String,
    pub seed: u64,
}

impl Metadata {
    pub fn new(input_digest: String, seed: u64) -> Self {
        Self { generated_at: None, input_digest, seed }
    }
}

/// SHA-256 over the given inputs, each length-prefixed so that part
/// boundaries affect the hash.
pub fn input_digest<'a, I>(parts: I) -> String
where
    I: IntoIterator<Item = &'a [u8]>,
{
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part);
    }
    hex::encode(hasher.finalize())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument<P> {
    pub schema_version: u32,
    pub kind: ReportKind,
    pub metadata: Metadata,
    pub payload: P,
}

impl<P: Serialize> ReportDocument<P> {
    pub fn new(kind: ReportKind, metadata: Metadata, payload: P) -> Self {
        Self { schema_version: SCHEMA_VERSION, kind, metadata, payload }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}

/// Parses a JSON document, checking its schema version and kind.
pub fn parse_document<P: DeserializeOwned>(text: &str, kind: ReportKind) -> Result<ReportDocument<P>> {
    let doc: ReportDocument<P> = serde_json::from_str(text)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::InvalidConfig(format!(
            "unsupported schema version {} (expected {SCHEMA_VERSION})",
            doc.schema_version
        )));
    }
    if doc.kind != kind {
        return Err(Error::InvalidConfig(format!("expected a {kind:?} document, found {:?}", doc.kind)));
    }
    Ok(doc)
}

fn no_svg(kind: ReportKind) -> Error {
    Error::UnknownFormat(format!("svg (not available for {kind:?})"))
}

pub fn emit_sota_map(grid: &SotaMapGrid, format: Format, metadata: &Metadata) -> Result<String> {
    match format {
        Format::Csv => sota_map_csv(grid),
        Format::Json => ReportDocument::new(ReportKind::SotaMap, metadata.clone(), grid).to_json(),
        Format::Svg => Ok(svg::sota_map_svg(grid)),
    }
}

pub fn emit_lifecycle_map(report: &LifecycleReport, format: Format, metadata: &Metadata) -> Result<String> {
    match format {
        Format::Csv => lifecycle_counts_csv(&report.counts),
        Format::Json => ReportDocument::new(ReportKind::LifecycleMap, metadata.clone(), report).to_json(),
        Format::Svg => Ok(svg::lifecycle_svg(report)),
    }
}

/// Refuses series where a year has more SOTA-reporting than active benchmarks.
pub fn emit_activity_counts(rows: &[ActivityRow], format: Format, metadata: &Metadata) -> Result<String> {
    if let Some(bad) = rows.iter().find(|r| r.sota_reporting > r.active) {
        return Err(Error::Invariant(format!(
            "{} {}: {} SOTA-reporting benchmarks exceed {} active",
            bad.domain, bad.year, bad.sota_reporting, bad.active
        )));
    }
    match format {
        Format::Csv => activity_csv(rows),
        Format::Json => ReportDocument::new(ReportKind::ActivityCounts, metadata.clone(), rows).to_json(),
        Format::Svg => Ok(svg::activity_svg(rows, &ActivitySvgStyle::default())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub source_id: String,
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSummary {
    pub config: crate::cluster::SomConfig,
    pub assignments: Vec<ClusterAssignment>,
    /// Unit sizes in row-major order.
    pub sizes: Vec<usize>,
    pub quantization_error: Vec<f64>,
}

pub fn emit_cluster_report(summary: &ClusterSummary, format: Format, metadata: &Metadata) -> Result<String> {
    match format {
        Format::Csv => cluster_csv(&summary.assignments),
        Format::Json => ReportDocument::new(ReportKind::ClusterReport, metadata.clone(), summary).to_json(),
        Format::Svg => Err(no_svg(ReportKind::ClusterReport)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopularitySummary {
    pub ranking: PopularityRanking,
    pub equal_share_fraction: Option<f64>,
    pub comparison: Vec<ComparisonRow>,
}

pub fn emit_popularity_report(summary: &PopularitySummary, format: Format, metadata: &Metadata) -> Result<String> {
    match format {
        Format::Csv => popularity_csv(&summary.ranking),
        Format::Json => ReportDocument::new(ReportKind::PopularityReport, metadata.clone(), summary).to_json(),
        Format::Svg => Err(no_svg(ReportKind::PopularityReport)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifecycle::{AnalysisWindow, LifecycleState, LifecycleTable, StateCount};
    use crate::sota::GridCell;

    fn meta() -> Metadata {
        Metadata::new(input_digest([b"abc".as_slice()]), 42)
    }

    fn grid() -> SotaMapGrid {
        SotaMapGrid {
            rows: vec!["parsing".into(), "qa".into()],
            columns: vec!["2019-01".into(), "2019-02".into()],
            cells: vec![
                GridCell { task: "parsing".into(), month: "2019-01".into(), anchors: 2, max_r: None },
                GridCell { task: "parsing".into(), month: "2019-02".into(), anchors: 0, max_r: Some(0.125) },
                GridCell { task: "qa".into(), month: "2019-02".into(), anchors: 0, max_r: Some(1.0 / 3.0) },
            ],
        }
    }

    #[test]
    fn format_parsing() {
        assert_eq!("JSON".parse::<Format>().unwrap(), Format::Json);
        assert!(matches!("xlsx".parse::<Format>(), Err(Error::UnknownFormat(f)) if f == "xlsx"));
    }

    #[test]
    fn digest_is_length_prefixed() {
        let a = input_digest([b"ab".as_slice(), b"c".as_slice()]);
        let b = input_digest([b"a".as_slice(), b"bc".as_slice()]);
        assert_ne!(a, b);
        assert_eq!(a.len(), 64);
        assert_eq!(a, input_digest([b"ab".as_slice(), b"c".as_slice()]));
    }

    #[test]
    fn sota_map_json_round_trip_is_a_fixed_point() {
        let g = grid();
        let json = emit_sota_map(&g, Format::Json, &meta()).unwrap();
        let doc: ReportDocument<SotaMapGrid> = parse_document(&json, ReportKind::SotaMap).unwrap();
        assert_eq!(doc.payload, g);
        assert_eq!(doc.metadata.seed, 42);
        assert_eq!(emit_sota_map(&doc.payload, Format::Json, &doc.metadata).unwrap(), json);
        assert!(parse_document::<SotaMapGrid>(&json, ReportKind::LifecycleMap).is_err());
    }

    #[test]
    fn empty_grid_is_valid() {
        let g = SotaMapGrid::default();
        assert_eq!(emit_sota_map(&g, Format::Csv, &meta()).unwrap(), "task,month,anchors,max_r\n");
        let json = emit_sota_map(&g, Format::Json, &meta()).unwrap();
        let doc: ReportDocument<SotaMapGrid> = parse_document(&json, ReportKind::SotaMap).unwrap();
        assert!(doc.payload.cells.is_empty());
        assert!(emit_sota_map(&g, Format::Svg, &meta()).unwrap().starts_with("<svg"));
    }

    #[test]
    fn activity_rows() {
        let rows = vec![ActivityRow { domain: "nlp".into(), year: 2019, active: 3, sota_reporting: 2 }];
        assert_eq!(emit_activity_counts(&rows, Format::Csv, &meta()).unwrap(), "domain,year,active,sota\nnlp,2019,3,2\n");
        let json = emit_activity_counts(&rows, Format::Json, &meta()).unwrap();
        let doc: ReportDocument<Vec<ActivityRow>> = parse_document(&json, ReportKind::ActivityCounts).unwrap();
        assert_eq!(doc.payload, rows);

        let bad = vec![ActivityRow { domain: "nlp".into(), year: 2019, active: 1, sota_reporting: 2 }];
        for f in [Format::Csv, Format::Json, Format::Svg] {
            assert!(matches!(emit_activity_counts(&bad, f, &meta()), Err(Error::Invariant(_))));
        }
    }

    #[test]
    fn lifecycle_json_round_trip() {
        let report = LifecycleReport {
            table: LifecycleTable { entries: vec![], window: AnalysisWindow { first_year: 2018, last_year: 2020 }, censor_year: 2020 },
            tasks: vec!["qa".into()],
            counts: vec![StateCount { task: "qa".into(), year: 2018, state: LifecycleState::New, count: 4 }],
        };
        let json = emit_lifecycle_map(&report, Format::Json, &meta()).unwrap();
        let doc: ReportDocument<LifecycleReport> = parse_document(&json, ReportKind::LifecycleMap).unwrap();
        assert_eq!(doc.payload, report);
        assert_eq!(emit_lifecycle_map(&report, Format::Csv, &meta()).unwrap(), "task,year,state,count\nqa,2018,new,4\n");
    }

    #[test]
    fn svg_is_refused_for_tables() {
        let summary = PopularitySummary {
            ranking: PopularityRanking::from_counts(None, vec![]),
            equal_share_fraction: None,
            comparison: vec![],
        };
        assert!(matches!(emit_popularity_report(&summary, Format::Svg, &meta()), Err(Error::UnknownFormat(_))));
    }
}
