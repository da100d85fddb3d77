//! Yearly benchmark lifecycle states: new, reporting SOTA, no SOTA / no
//! results, and disbanded.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use crate::ingest::{ResultRecord, TaskHierarchy};
use crate::sota::{benchmark_tasks, extract_sota_trajectory, group_by_benchmark, group_by_series};
use crate::{Error, Result};

/// Minimum number of results some metric of a benchmark must have.
pub const MIN_RESULTS_PER_METRIC: usize = 3;
/// Minimum number of included benchmarks for a task to be shown.
pub const MIN_BENCHMARKS_PER_TASK: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LifecycleState {
    New,
    ReportingSota,
    NoSotaOrNoResults,
    Disbanded,
}

impl LifecycleState {
    pub const ALL: [LifecycleState; 4] = [Self::New, Self::ReportingSota, Self::NoSotaOrNoResults, Self::Disbanded];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::New => "new",
            Self::ReportingSota => "reporting_sota",
            Self::NoSotaOrNoResults => "no_sota_or_no_results",
            Self::Disbanded => "disbanded",
        }
    }
}

impl fmt::Display for LifecycleState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LifecycleState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|state| state.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown lifecycle state {s:?}")))
    }
}

/// Whether a disbanded benchmark is reported in every later year or only once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisbandedMode {
    #[default]
    Persistent,
    FirstYearOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisWindow {
    pub first_year: i32,
    pub last_year: i32,
}

impl AnalysisWindow {
    pub fn contains(&self, year: i32) -> bool {
        (self.first_year..=self.last_year).contains(&year)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct YearActivity {
    pub results: usize,
    pub sota_points: usize,
}

/// Per-year result and SOTA-point counts of one benchmark.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BenchmarkHistory {
    pub years: BTreeMap<i32, YearActivity>,
}

impl BenchmarkHistory {
    pub fn first_result_year(&self) -> Option<i32> {
        self.years.iter().find(|(_, a)| a.results > 0).map(|(y, _)| *y)
    }

    pub fn last_result_year(&self) -> Option<i32> {
        self.years.iter().rev().find(|(_, a)| a.results > 0).map(|(y, _)| *y)
    }

    /// Builds the history from one benchmark's polarity-normalized records.
    pub fn from_records(records: &[&ResultRecord]) -> Self {
        let mut years: BTreeMap<i32, YearActivity> = BTreeMap::new();
        for r in records {
            years.entry(r.date.year()).or_default().results += 1;
        }
        let owned: Vec<ResultRecord> = records.iter().map(|r| (*r).clone()).collect();
        for group in group_by_series(&owned).into_values() {
            let traj = extract_sota_trajectory(group).expect("grouped series are valid");
            for p in traj.points {
                years.entry(p.date.year()).or_default().sota_points += 1;
            }
        }
        Self { years }
    }
}

/// Lifecycle state of one benchmark in one year.
///
/// Precedence is New > ReportingSota > Disbanded > NoSotaOrNoResults. Every
/// year after the last result year is Disbanded; a silent year followed by
/// later results is NoSotaOrNoResults.
pub fn classify_benchmark_year(history: &BenchmarkHistory, year: i32, window: AnalysisWindow) -> Result<LifecycleState> {
    let first = history.first_result_year().ok_or(Error::EmptyInput("benchmark history"))?;
    let last = history.last_result_year().expect("first implies last");
    if year < first {
        return Err(Error::YearBeforeFirstResult { year, first });
    }
    if !window.contains(year) {
        return Err(Error::InvalidConfig(format!(
            "year {year} outside analysis window {}..={}",
            window.first_year, window.last_year
        )));
    }
    let activity = history.years.get(&year).copied().unwrap_or_default();
    Ok(if year == first {
        LifecycleState::New
    } else if activity.sota_points > 0 {
        LifecycleState::ReportingSota
    } else if year > last {
        LifecycleState::Disbanded
    } else {
        LifecycleState::NoSotaOrNoResults
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchmarkYear {
    pub benchmark_id: String,
    pub year: i32,
    pub state: LifecycleState,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LifecycleTable {
    /// Sorted by benchmark, then year.
    pub entries: Vec<BenchmarkYear>,
    pub window: AnalysisWindow,
    pub censor_year: i32,
}

impl LifecycleTable {
    pub fn state(&self, benchmark_id: &str, year: i32) -> Option<LifecycleState> {
        self.entries
            .iter()
            .find(|e| e.benchmark_id == benchmark_id && e.year == year)
            .map(|e| e.state)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateCount {
    pub task: String,
    pub year: i32,
    pub state: LifecycleState,
    pub count: usize,
}

/// Lifecycle table plus per-(task, year, state) counts. `tasks` gives the display row order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LifecycleReport {
    pub table: LifecycleTable,
    pub tasks: Vec<String>,
    pub counts: Vec<StateCount>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LifecycleOptions {
    /// Defaults to the first and last year present in the records.
    pub window: Option<AnalysisWindow>,
    /// Last year emitted; defaults to the window end.
    pub censor_year: Option<i32>,
    pub disbanded: DisbandedMode,
}

/// Classifies every included benchmark-year and aggregates counts per task.
///
/// A benchmark is included when some metric has at least three reported
/// results; a task is kept when it holds at least two included benchmarks.
pub fn lifecycle_table(records: &[ResultRecord], hierarchy: &TaskHierarchy, options: LifecycleOptions) -> Result<LifecycleReport> {
    let years: BTreeSet<i32> = records.iter().map(|r| r.date.year()).collect();
    let window = match (options.window, years.first(), years.last()) {
        (Some(w), _, _) => w,
        (None, Some(a), Some(b)) => AnalysisWindow { first_year: *a, last_year: *b },
        (None, _, _) => AnalysisWindow { first_year: 0, last_year: 0 },
    };
    if window.first_year > window.last_year {
        return Err(Error::InvalidConfig("analysis window ends before it starts".into()));
    }
    let censor_year = options.censor_year.unwrap_or(window.last_year).min(window.last_year);
    let tasks = benchmark_tasks(records);

    let mut included: BTreeMap<&str, Vec<&ResultRecord>> = BTreeMap::new();
    for (benchmark, group) in group_by_benchmark(records) {
        let mut per_metric: BTreeMap<&str, usize> = BTreeMap::new();
        for r in &group {
            *per_metric.entry(r.metric_name.as_str()).or_default() += 1;
        }
        if per_metric.values().any(|n| *n >= MIN_RESULTS_PER_METRIC) {
            included.insert(benchmark, group);
        }
    }
    let mut per_task: BTreeMap<&str, usize> = BTreeMap::new();
    for benchmark in included.keys() {
        *per_task.entry(tasks[*benchmark].as_str()).or_default() += 1;
    }
    included.retain(|b, _| per_task[tasks[*b].as_str()] >= MIN_BENCHMARKS_PER_TASK);

    let mut entries = Vec::new();
    let mut counts: BTreeMap<(&str, i32, LifecycleState), usize> = BTreeMap::new();
    for (benchmark, group) in &included {
        let history = BenchmarkHistory::from_records(group);
        let first = history.first_result_year().expect("included benchmarks have results");
        for year in first.max(window.first_year)..=censor_year {
            let state = classify_benchmark_year(&history, year, window)?;
            if state == LifecycleState::Disbanded
                && options.disbanded == DisbandedMode::FirstYearOnly
                && history.last_result_year().is_some_and(|last| year > last + 1)
            {
                break;
            }
            entries.push(BenchmarkYear { benchmark_id: benchmark.to_string(), year, state });
            *counts.entry((tasks[*benchmark].as_str(), year, state)).or_default() += 1;
        }
    }

    let kept_tasks: BTreeSet<&str> = included.keys().map(|b| tasks[*b].as_str()).collect();
    let mut order: Vec<String> = hierarchy
        .adjacency_order()
        .into_iter()
        .filter(|t| kept_tasks.contains(t.as_str()))
        .collect();
    let placed: BTreeSet<String> = order.iter().cloned().collect();
    order.extend(kept_tasks.iter().filter(|t| !placed.contains(**t)).map(|t| t.to_string()));

    let mut count_rows = Vec::new();
    for task in &order {
        for ((t, year, state), count) in counts.iter().filter(|((t, _, _), _)| *t == task.as_str()) {
            count_rows.push(StateCount { task: t.to_string(), year: *year, state: *state, count: *count });
        }
    }

    Ok(LifecycleReport {
        table: LifecycleTable { entries, window, censor_year },
        tasks: order,
        counts: count_rows,
    })
}
