use std::collections::{BTreeMap, BTreeSet};

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use super::{benchmark_tasks, extract_sota_trajectory, group_by_benchmark, group_by_series, map_eligible};
use super::{relative_improvements, RelativeImprovement};
use crate::ingest::{ResultRecord, TaskHierarchy};
use crate::{Error, Result};

/// Calendar month key, `YYYY-MM`.
pub fn month_key(date: NaiveDate) -> String {
    format!("{:04}-{:02}", date.year(), date.month())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub task: String,
    pub month: String,
    pub anchors: usize,
    pub max_r: Option<f64>,
}

impl GridCell {
    /// Number of glyphs the cell draws: one dash for any anchors, one marker for an improvement.
    pub fn icons(&self) -> usize {
        usize::from(self.anchors > 0) + usize::from(self.max_r.is_some())
    }
}

/// Task × month grid of anchors and maximal relative improvements.
///
/// `cells` is ordered by row position, then month, and only holds
/// non-empty cells. `columns` spans every month from the first to the last.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SotaMapGrid {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub cells: Vec<GridCell>,
}

impl SotaMapGrid {
    pub fn cell(&self, task: &str, month: &str) -> Option<&GridCell> {
        self.cells.iter().find(|c| c.task == task && c.month == month)
    }
}

fn month_range(first: &str, last: &str) -> Vec<String> {
    let parse = |s: &str| -> (i32, u32) {
        let (y, m) = s.split_once('-').expect("month keys are YYYY-MM");
        (y.parse().expect("year"), m.parse().expect("month"))
    };
    let (mut y, mut m) = parse(first);
    let end = parse(last);
    let mut out = Vec::new();
    while (y, m) <= end {
        out.push(format!("{y:04}-{m:02}"));
        m += 1;
        if m > 12 {
            m = 1;
            y += 1;
        }
    }
    out
}

/// Aggregates relative improvements and anchors into a task-month grid.
///
/// Each cell keeps the maximum `r` of all the task's benchmarks in that month
/// plus the number of anchors. Tasks whose row would draw only a single icon
/// are dropped. Rows follow the hierarchy's adjacency order; tasks unknown to
/// the hierarchy come last in name order.
pub fn aggregate_task_month(
    improvements: &[RelativeImprovement],
    anchors: &[(String, NaiveDate)],
    benchmark_task: &BTreeMap<String, String>,
    hierarchy: &TaskHierarchy,
) -> Result<SotaMapGrid> {
    let mut cells: BTreeMap<(String, String), (usize, Option<f64>)> = BTreeMap::new();
    for imp in improvements {
        let task = benchmark_task
            .get(&imp.benchmark_id)
            .ok_or_else(|| Error::UnmappedBenchmark(imp.benchmark_id.clone()))?;
        let cell = cells.entry((task.clone(), month_key(imp.date))).or_default();
        cell.1 = Some(cell.1.map_or(imp.r, |m: f64| m.max(imp.r)));
    }
    for (task, date) in anchors {
        cells.entry((task.clone(), month_key(*date))).or_default().0 += 1;
    }

    let mut icons: BTreeMap<&str, usize> = BTreeMap::new();
    for ((task, _), (a, r)) in &cells {
        *icons.entry(task.as_str()).or_default() += usize::from(*a > 0) + usize::from(r.is_some());
    }
    let kept: BTreeSet<String> = icons
        .into_iter()
        .filter(|(_, n)| *n > 1)
        .map(|(t, _)| t.to_string())
        .collect();

    let mut rows: Vec<String> = hierarchy
        .adjacency_order()
        .into_iter()
        .filter(|t| kept.contains(t))
        .collect();
    let placed: BTreeSet<String> = rows.iter().cloned().collect();
    rows.extend(kept.iter().filter(|t| !placed.contains(*t)).cloned());

    let months: BTreeSet<&str> = cells
        .keys()
        .filter(|(t, _)| kept.contains(t))
        .map(|(_, m)| m.as_str())
        .collect();
    let columns = match (months.first(), months.last()) {
        (Some(first), Some(last)) => month_range(first, last),
        _ => Vec::new(),
    };

    let mut ordered = Vec::new();
    for task in &rows {
        for ((t, month), (anchors, max_r)) in cells.range((task.clone(), String::new())..) {
            if t != task {
                break;
            }
            ordered.push(GridCell {
                task: t.clone(),
                month: month.clone(),
                anchors: *anchors,
                max_r: *max_r,
            });
        }
    }
    Ok(SotaMapGrid { rows, columns, cells: ordered })
}

/// Builds the task-month map straight from polarity-normalized records.
///
/// Only benchmarks with results on at least three distinct dates enter.
/// Every benchmark contributes one anchor (its first result date) and the
/// relative improvements of each of its metric trajectories.
pub fn build_sota_map(records: &[ResultRecord], hierarchy: &TaskHierarchy) -> Result<SotaMapGrid> {
    let eligible: BTreeSet<&str> = group_by_benchmark(records)
        .into_iter()
        .filter(|(_, rs)| map_eligible(rs.iter().copied()))
        .map(|(b, _)| b)
        .collect();
    let tasks = benchmark_tasks(records);

    let mut improvements = Vec::new();
    let mut first_dates: BTreeMap<&str, NaiveDate> = BTreeMap::new();
    for ((benchmark, _), group) in group_by_series(records) {
        if !eligible.contains(benchmark) {
            continue;
        }
        let traj = extract_sota_trajectory(group)?;
        let first = first_dates.entry(benchmark).or_insert(traj.first_date());
        *first = (*first).min(traj.first_date());
        improvements.extend(relative_improvements(&traj));
    }
    let anchors: Vec<(String, NaiveDate)> = first_dates
        .into_iter()
        .map(|(b, d)| (tasks[b].clone(), d))
        .collect();
    aggregate_task_month(&improvements, &anchors, &tasks, hierarchy)
}
