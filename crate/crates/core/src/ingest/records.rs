use std::io::{BufRead, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::Result;

/// One reported benchmark result.
///
/// `value` is the polarity-normalized score (higher is better). Until
/// [`apply_polarity`](super::apply_polarity) runs it mirrors `raw_value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub benchmark_id: String,
    pub dataset_name: String,
    pub task_name: String,
    pub metric_name: String,
    pub raw_value: f64,
    pub value: f64,
    pub date: NaiveDate,
    pub paper_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct ParseReport {
    pub records: Vec<ResultRecord>,
    pub errors: Vec<LineError>,
}

impl ParseReport {
    pub fn is_clean(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Parses a metric value that may carry a percent sign or thousands separators.
pub fn parse_numeric_value(text: &str) -> Option<f64> {
    let cleaned: String = text
        .trim()
        .trim_end_matches('%')
        .chars()
        .filter(|c| *c != ',' && *c != '_' && !c.is_whitespace())
        .collect();
    cleaned.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn required_str(obj: &serde_json::Map<String, Value>, key: &str) -> std::result::Result<String, String> {
    match obj.get(key) {
        Some(Value::String(s)) if !s.trim().is_empty() => Ok(s.clone()),
        Some(Value::String(_)) | None | Some(Value::Null) => Err(format!("missing required field {key:?}")),
        Some(other) => Err(format!("field {key:?} must be a string, got {other}")),
    }
}

fn numeric_field(obj: &serde_json::Map<String, Value>, key: &str) -> std::result::Result<Option<f64>, String> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::Number(n)) => n
            .as_f64()
            .filter(|v| v.is_finite())
            .map(Some)
            .ok_or_else(|| format!("field {key:?} is not a finite number")),
        Some(Value::String(s)) => parse_numeric_value(s)
            .map(Some)
            .ok_or_else(|| format!("field {key:?} is not numeric: {s:?}")),
        Some(other) => Err(format!("field {key:?} is not numeric: {other}")),
    }
}

fn parse_line(text: &str) -> std::result::Result<ResultRecord, String> {
    let parsed: Value = serde_json::from_str(text).map_err(|e| format!("malformed record: {e}"))?;
    let obj = parsed.as_object().ok_or("record is not a JSON object")?;

    let date_text = required_str(obj, "date")?;
    let date = NaiveDate::parse_from_str(date_text.trim(), "%Y-%m-%d")
        .map_err(|e| format!("unparseable date {date_text:?}: {e}"))?;
    let raw_value = numeric_field(obj, "raw_value")?.ok_or("missing required field \"raw_value\"")?;
    // A previously normalized export carries its own `value`.
    let value = numeric_field(obj, "value")?.unwrap_or(raw_value);
    let model_name = match obj.get("model_name") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(other) => return Err(format!("field \"model_name\" must be a string, got {other}")),
    };

    Ok(ResultRecord {
        benchmark_id: required_str(obj, "benchmark_id")?,
        dataset_name: required_str(obj, "dataset_name")?,
        task_name: required_str(obj, "task_name")?,
        metric_name: required_str(obj, "metric_name")?,
        raw_value,
        value,
        date,
        paper_id: required_str(obj, "paper_id")?,
        model_name,
    })
}

/// Parses a line-delimited JSON result export.
///
/// Blank lines are skipped. Malformed lines are reported with their 1-based
/// line number and never silently dropped.
pub fn parse_result_records<R: BufRead>(reader: R) -> Result<ParseReport> {
    let mut report = ParseReport::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(&line) {
            Ok(record) => report.records.push(record),
            Err(message) => report.errors.push(LineError { line: idx + 1, message }),
        }
    }
    Ok(report)
}

pub fn write_result_records<W: Write>(records: &[ResultRecord], mut writer: W) -> Result<()> {
    for record in records {
        serde_json::to_writer(&mut writer, record)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> ParseReport {
        parse_result_records(text.as_bytes()).unwrap()
    }

    #[test]
    fn empty_stream() {
        let report = parse("");
        assert!(report.records.is_empty());
        assert!(report.errors.is_empty());
    }

    #[test]
    fn well_formed_line() {
        let report = parse(
            r#"{"benchmark_id":"B","dataset_name":"D","task_name":"T","metric_name":"Accuracy","raw_value":71.2,"date":"2016-01-03","paper_id":"p1"}"#,
        );
        assert!(report.is_clean());
        let r = &report.records[0];
        assert_eq!(r.benchmark_id, "B");
        assert_eq!(r.metric_name, "Accuracy");
        assert_eq!(r.raw_value, 71.2);
        assert_eq!(r.value, 71.2);
        assert_eq!(r.date, NaiveDate::from_ymd_opt(2016, 1, 3).unwrap());
        assert_eq!(r.model_name, None);
    }

    #[test]
    fn invalid_month_is_reported() {
        let report = parse(
            r#"{"benchmark_id":"B","dataset_name":"D","task_name":"T","metric_name":"Accuracy","raw_value":71.2,"date":"2016-13-01","paper_id":"p1"}"#,
        );
        assert!(report.records.is_empty());
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.errors[0].line, 1);
        assert!(report.errors[0].message.contains("date"));
    }

    #[test]
    fn missing_field_and_non_numeric_value() {
        let text = concat!(
            r#"{"benchmark_id":"B","dataset_name":"D","task_name":"T","raw_value":1,"date":"2016-01-03","paper_id":"p1"}"#,
            "\n\n",
            r#"{"benchmark_id":"B","dataset_name":"D","task_name":"T","metric_name":"F1","raw_value":"n/a","date":"2016-01-03","paper_id":"p1"}"#,
        );
        let report = parse(text);
        assert!(report.records.is_empty());
        assert_eq!(report.errors[0].line, 1);
        assert!(report.errors[0].message.contains("metric_name"));
        assert_eq!(report.errors[1].line, 3);
        assert!(report.errors[1].message.contains("not numeric"));
    }

    #[test]
    fn percent_and_separator_strings() {
        assert_eq!(parse_numeric_value("71.2%"), Some(71.2));
        assert_eq!(parse_numeric_value(" 1,234.5 "), Some(1234.5));
        assert_eq!(parse_numeric_value("-3e2"), Some(-300.0));
        assert_eq!(parse_numeric_value("inf"), None);
        assert_eq!(parse_numeric_value("abc"), None);
    }

    #[test]
    fn model_name_is_optional() {
        let report = parse(
            r#"{"benchmark_id":"B","dataset_name":"D","task_name":"T","metric_name":"F1","raw_value":"88.1%","date":"2019-05-01","paper_id":"p","model_name":"BERT"}"#,
        );
        assert_eq!(report.records[0].model_name.as_deref(), Some("BERT"));
        assert_eq!(report.records[0].raw_value, 88.1);
    }
}
