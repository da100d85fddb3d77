use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::ResultRecord;
use crate::{Error, Result};

/// Minority trend share above which a metric is considered to be used inconsistently.
pub const MINORITY_TREND_THRESHOLD: f64 = 0.25;

/// Name fragments that usually indicate lower-is-better metrics.
pub const DEFAULT_NEGATIVE_KEYWORDS: &[&str] = &["error", "loss", "perplexity", "distance", "rmse", "mae", "fid"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Curated,
    Inferred,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PolarityTable {
    pub entries: BTreeMap<String, Polarity>,
    pub provenance: BTreeMap<String, Provenance>,
}

impl PolarityTable {
    pub fn insert(&mut self, metric: &str, polarity: Polarity, provenance: Provenance) -> Result<()> {
        if self.entries.contains_key(metric) {
            return Err(Error::DuplicatePolarity(metric.to_string()));
        }
        self.entries.insert(metric.to_string(), polarity);
        self.provenance.insert(metric.to_string(), provenance);
        Ok(())
    }

    pub fn get(&self, metric: &str) -> Option<Polarity> {
        self.entries.get(metric).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Loads a `metric_name,polarity,provenance` CSV (header required).
pub fn load_polarity_table<R: Read>(reader: R) -> Result<PolarityTable> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut table = PolarityTable::default();
    for (idx, row) in csv.records().enumerate() {
        let row = row?;
        let line = idx + 2;
        let metric = row.get(0).unwrap_or("");
        if metric.is_empty() {
            return Err(Error::Parse { line, message: "empty metric name".into() });
        }
        let polarity = match row.get(1).unwrap_or("").to_ascii_lowercase().as_str() {
            "positive" | "+" => Polarity::Positive,
            "negative" | "-" => Polarity::Negative,
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("polarity must be positive or negative, got {other:?}"),
                })
            }
        };
        let provenance = match row.get(2).unwrap_or("").to_ascii_lowercase().as_str() {
            "curated" => Provenance::Curated,
            "inferred" => Provenance::Inferred,
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("provenance must be curated or inferred, got {other:?}"),
                })
            }
        };
        table.insert(metric, polarity, provenance)?;
    }
    Ok(table)
}

/// Sets `value` from `raw_value`, negating negative-polarity metrics.
pub fn apply_polarity(records: &[ResultRecord], table: &PolarityTable) -> Result<Vec<ResultRecord>> {
    let missing: BTreeSet<&str> = records
        .iter()
        .filter(|r| table.get(&r.metric_name).is_none())
        .map(|r| r.metric_name.as_str())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingPolarity(missing.into_iter().map(String::from).collect()));
    }
    Ok(records
        .iter()
        .map(|r| {
            let mut out = r.clone();
            out.value = match table.get(&r.metric_name) {
                Some(Polarity::Negative) => -r.raw_value,
                _ => r.raw_value,
            };
            out
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictReason {
    MixedTrend,
    KeywordDisagreement,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConflictEvidence {
    pub rising_benchmarks: usize,
    pub falling_benchmarks: usize,
    pub minority_fraction: f64,
    pub keyword_negative: bool,
    pub reason: ConflictReason,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarityConflict {
    pub metric_name: String,
    pub evidence: ConflictEvidence,
}

/// Sign of the Kendall S statistic between date and raw value.
fn kendall_sign(points: &[(i64, f64)]) -> i8 {
    let mut s: i64 = 0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let dx = (b.0 - a.0).signum();
            let dy = b.1.partial_cmp(&a.1).map_or(0, |o| o as i64);
            s += dx * dy;
        }
    }
    s.signum() as i8
}

/// Builds the polarity curation worklist.
///
/// Every (benchmark, metric) series gets a trend direction from the sign of
/// its Kendall correlation between date and raw value; flat series are
/// ignored. A metric is flagged when the minority direction across its
/// benchmarks exceeds [`MINORITY_TREND_THRESHOLD`], or when its name
/// suggests lower-is-better but the majority trend rises (or vice versa).
pub fn detect_polarity_conflicts(records: &[ResultRecord], keyword_negatives: &[&str]) -> Vec<PolarityConflict> {
    let mut series: BTreeMap<(&str, &str), Vec<(i64, f64)>> = BTreeMap::new();
    for r in records {
        let day = r.date.to_epoch_days() as i64;
        series
            .entry((r.metric_name.as_str(), r.benchmark_id.as_str()))
            .or_default()
            .push((day, r.raw_value));
    }

    let mut trends: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for ((metric, _), points) in &series {
        let counts = trends.entry(metric).or_default();
        match kendall_sign(points) {
            1 => counts.0 += 1,
            -1 => counts.1 += 1,
            _ => {}
        }
    }

    let keywords: Vec<String> = keyword_negatives.iter().map(|k| k.to_lowercase()).collect();
    let mut out = Vec::new();
    for (metric, (rising, falling)) in trends {
        let total = rising + falling;
        if total == 0 {
            continue;
        }
        let lowered = metric.to_lowercase();
        let keyword_negative = keywords.iter().any(|k| lowered.contains(k.as_str()));
        let minority_fraction = rising.min(falling) as f64 / total as f64;
        let mixed = minority_fraction > MINORITY_TREND_THRESHOLD;
        let disagrees = (keyword_negative && rising > falling) || (!keyword_negative && falling > rising);
        let reason = match (mixed, disagrees) {
            (true, true) => ConflictReason::Both,
            (true, false) => ConflictReason::MixedTrend,
            (false, true) => ConflictReason::KeywordDisagreement,
            (false, false) => continue,
        };
        out.push(PolarityConflict {
            metric_name: metric.to_string(),
            evidence: ConflictEvidence {
                rising_benchmarks: rising,
                falling_benchmarks: falling,
                minority_fraction,
                keyword_negative,
                reason,
            },
        });
    }
    out
}
