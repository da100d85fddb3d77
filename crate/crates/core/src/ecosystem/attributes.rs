use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::stats::{welch_t_test, Alternative};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Top,
    Bottom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeKind {
    Numeric,
    Boolean,
}

const NUMERIC_COLUMNS: &[&str] = &["task_types", "sub_benchmarks", "institutions", "publications"];
const BOOLEAN_COLUMNS: &[&str] = &["leaderboard", "competition", "top_venue", "top_affiliation"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeRow {
    pub dataset: String,
    pub group: Group,
    pub numeric: BTreeMap<String, f64>,
    pub boolean: BTreeMap<String, bool>,
}

/// Annotated top and bottom datasets. `columns` keeps the file's attribute order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AttributeTable {
    pub columns: Vec<(String, AttributeKind)>,
    pub rows: Vec<AttributeRow>,
}

impl AttributeTable {
    pub fn group_sizes(&self) -> (usize, usize) {
        let top = self.rows.iter().filter(|r| r.group == Group::Top).count();
        (top, self.rows.len() - top)
    }

    pub fn groups_balanced(&self) -> bool {
        let (top, bottom) = self.group_sizes();
        top == bottom
    }

    pub fn kind_of(&self, attribute: &str) -> Option<AttributeKind> {
        self.columns.iter().find(|(c, _)| c == attribute).map(|(_, k)| *k)
    }
}

fn parse_bool(text: &str) -> Option<bool> {
    match text.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "y" => Some(true),
        "0" | "false" | "no" | "n" => Some(false),
        _ => None,
    }
}

/// Reads the annotation CSV: `dataset,group,<attribute columns...>`.
///
/// Known columns have fixed kinds; any other column is boolean when every
/// value is a yes/no token and numeric otherwise.
pub fn load_attribute_table<R: Read>(reader: R) -> Result<AttributeTable> {
    let mut csv = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers: Vec<String> = csv.headers()?.iter().map(|h| h.to_ascii_lowercase()).collect();
    if headers.len() < 3 || headers[0] != "dataset" || headers[1] != "group" {
        return Err(Error::Parse { line: 1, message: "expected header dataset,group,<attributes...>".into() });
    }
    let raw: Vec<csv::StringRecord> = csv.records().collect::<std::result::Result<_, _>>()?;

    let mut columns = Vec::new();
    for (i, name) in headers.iter().enumerate().skip(2) {
        let kind = if NUMERIC_COLUMNS.contains(&name.as_str()) {
            AttributeKind::Numeric
        } else if BOOLEAN_COLUMNS.contains(&name.as_str())
            || raw.iter().all(|r| {
                let v = r.get(i).unwrap_or("").to_ascii_lowercase();
                matches!(v.as_str(), "true" | "false" | "yes" | "no" | "y" | "n")
            })
        {
            AttributeKind::Boolean
        } else {
            AttributeKind::Numeric
        };
        columns.push((name.clone(), kind));
    }

    let mut rows = Vec::with_capacity(raw.len());
    for (idx, record) in raw.iter().enumerate() {
        let line = idx + 2;
        let group = match record.get(1).unwrap_or("").to_ascii_lowercase().as_str() {
            "top" => Group::Top,
            "bottom" => Group::Bottom,
            other => return Err(Error::Parse { line, message: format!("group must be top or bottom, got {other:?}") }),
        };
        let mut row = AttributeRow {
            dataset: record.get(0).unwrap_or("").to_string(),
            group,
            numeric: BTreeMap::new(),
            boolean: BTreeMap::new(),
        };
        for (offset, (name, kind)) in columns.iter().enumerate() {
            let text = record.get(offset + 2).unwrap_or("");
            match kind {
                AttributeKind::Numeric => {
                    let v = text.parse::<f64>().map_err(|_| Error::Parse {
                        line,
                        message: format!("column {name:?} expects a number, got {text:?}"),
                    })?;
                    row.numeric.insert(name.clone(), v);
                }
                AttributeKind::Boolean => {
                    let v = parse_bool(text).ok_or_else(|| Error::Parse {
                        line,
                        message: format!("column {name:?} expects yes/no, got {text:?}"),
                    })?;
                    row.boolean.insert(name.clone(), v);
                }
            }
        }
        rows.push(row);
    }
    Ok(AttributeTable { columns, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GroupSummary {
    Numeric { median: f64, min: f64, max: f64 },
    Boolean { percent_true: f64 },
}

fn fmt_number(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v}")
    }
}

impl GroupSummary {
    /// `median (min-max)` for numeric attributes, a rounded percentage for booleans.
    pub fn display(&self) -> String {
        match self {
            Self::Numeric { median, min, max } => {
                format!("{} ({}-{})", fmt_number(*median), fmt_number(*min), fmt_number(*max))
            }
            Self::Boolean { percent_true } => format!("{percent_true:.0}%"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub attribute: String,
    pub kind: AttributeKind,
    pub top: GroupSummary,
    pub bottom: GroupSummary,
    /// None when the t statistic is undefined (both groups constant).
    pub t: Option<f64>,
    pub df: Option<f64>,
    pub p: Option<f64>,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn summarize(values: &[f64], kind: AttributeKind) -> GroupSummary {
    match kind {
        AttributeKind::Numeric => {
            let mut sorted = values.to_vec();
            sorted.sort_by(f64::total_cmp);
            GroupSummary::Numeric { median: median(&sorted), min: sorted[0], max: sorted[sorted.len() - 1] }
        }
        AttributeKind::Boolean => GroupSummary::Boolean {
            percent_true: 100.0 * values.iter().sum::<f64>() / values.len() as f64,
        },
    }
}

/// Summarises one attribute per group and tests "top > bottom" with a
/// one-sided Welch test. Booleans enter the test as 0/1.
pub fn compare_attribute(table: &AttributeTable, attribute: &str, kind: AttributeKind) -> Result<ComparisonRow> {
    let mut top = Vec::new();
    let mut bottom = Vec::new();
    for row in &table.rows {
        let value = match kind {
            AttributeKind::Numeric => row.numeric.get(attribute).copied(),
            AttributeKind::Boolean => row.boolean.get(attribute).map(|b| f64::from(u8::from(*b))),
        }
        .ok_or_else(|| Error::UnknownAttribute(attribute.to_string()))?;
        match row.group {
            Group::Top => top.push(value),
            Group::Bottom => bottom.push(value),
        }
    }
    if top.is_empty() || bottom.is_empty() {
        return Err(Error::EmptyInput("both popularity groups need rows"));
    }
    let test = match welch_t_test(&top, &bottom, Alternative::Greater) {
        Ok(r) => Some(r),
        Err(Error::UndefinedStatistic(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(ComparisonRow {
        attribute: attribute.to_string(),
        kind,
        top: summarize(&top, kind),
        bottom: summarize(&bottom, kind),
        t: test.map(|r| r.t),
        df: test.map(|r| r.df),
        p: test.map(|r| r.p),
    })
}

/// Compares every attribute column in file order.
pub fn compare_all(table: &AttributeTable) -> Result<Vec<ComparisonRow>> {
    table.columns.iter().map(|(name, kind)| compare_attribute(table, name, *kind)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[(&str, &str, f64, bool)]) -> AttributeTable {
        let mut text = String::from("dataset,group,task_types,leaderboard\n");
        for (d, g, n, b) in rows {
            text.push_str(&format!("{d},{g},{n},{}\n", if *b { "yes" } else { "no" }));
        }
        load_attribute_table(text.as_bytes()).unwrap()
    }

    #[test]
    fn leaderboard_percentages() {
        let mut rows = Vec::new();
        let names: Vec<String> = (0..40).map(|i| format!("d{i}")).collect();
        for i in 0..20 {
            rows.push((names[i].as_str(), "top", 1.0, i < 7));
            rows.push((names[20 + i].as_str(), "bottom", 1.0, false));
        }
        let t = table(&rows);
        assert!(t.groups_balanced());
        let row = compare_attribute(&t, "leaderboard", AttributeKind::Boolean).unwrap();
        assert_eq!(row.top.display(), "35%");
        assert_eq!(row.bottom.display(), "0%");
        assert!(row.p.unwrap() < 0.01);
        // Constant in both groups: no test.
        let flat = compare_attribute(&t, "task_types", AttributeKind::Numeric).unwrap();
        assert_eq!(flat.p, None);
        assert_eq!(flat.top.display(), "1 (1-1)");
    }

    #[test]
    fn identical_numeric_groups() {
        let t = table(&[("a", "top", 1.0, false), ("b", "top", 3.0, false), ("c", "bottom", 1.0, false), ("d", "bottom", 3.0, false)]);
        let row = compare_attribute(&t, "task_types", AttributeKind::Numeric).unwrap();
        assert_eq!(row.top, row.bottom);
        assert_eq!(row.p, Some(0.5));
        assert_eq!(row.top.display(), "2 (1-3)");
    }

    #[test]
    fn unknown_attribute() {
        let t = table(&[("a", "top", 1.0, false), ("c", "bottom", 1.0, false)]);
        assert!(matches!(
            compare_attribute(&t, "citations", AttributeKind::Numeric),
            Err(Error::UnknownAttribute(a)) if a == "citations"
        ));
    }

    #[test]
    fn kinds_are_inferred() {
        let t = load_attribute_table("dataset,group,publications,open_source,notes_len\na,top,3,yes,4\nb,bottom,1,no,5\n".as_bytes()).unwrap();
        assert_eq!(t.kind_of("publications"), Some(AttributeKind::Numeric));
        assert_eq!(t.kind_of("open_source"), Some(AttributeKind::Boolean));
        assert_eq!(t.kind_of("notes_len"), Some(AttributeKind::Numeric));
        assert!(load_attribute_table("dataset,group,x\na,middle,1\n".as_bytes()).is_err());
    }

    #[test]
    fn half_medians_render() {
        assert_eq!(GroupSummary::Numeric { median: 1.5, min: 1.0, max: 2.0 }.display(), "1.5 (1-2)");
    }
}
