use std::collections::{BTreeMap, BTreeSet};

use chrono::Datelike;
use serde::{Deserialize, Serialize};

use super::{benchmark_tasks, extract_sota_trajectory, group_by_benchmark, group_by_series, map_eligible};
use crate::ingest::{ResultRecord, TaskHierarchy};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityRow {
    pub domain: String,
    pub year: i32,
    pub active: usize,
    pub sota_reporting: usize,
}

/// Per-domain, per-year counts of active and SOTA-reporting benchmarks.
///
/// A benchmark is active in a year with at least one result and
/// SOTA-reporting in a year holding at least one trajectory point of any of
/// its metrics (anchors included). Each domain gets a contiguous year range.
pub fn activity_counts(records: &[ResultRecord], hierarchy: &TaskHierarchy) -> Vec<ActivityRow> {
    let tasks = benchmark_tasks(records);
    let domain_of = |benchmark: &str| hierarchy.domain_of(&tasks[benchmark]).to_string();

    let mut active: BTreeMap<(String, i32), BTreeSet<&str>> = BTreeMap::new();
    let mut sota: BTreeMap<(String, i32), BTreeSet<&str>> = BTreeMap::new();
    for r in records {
        active
            .entry((domain_of(&r.benchmark_id), r.date.year()))
            .or_default()
            .insert(&r.benchmark_id);
    }
    for ((benchmark, _), group) in group_by_series(records) {
        let traj = extract_sota_trajectory(group).expect("grouped series are valid");
        for p in &traj.points {
            sota.entry((domain_of(benchmark), p.date.year())).or_default().insert(benchmark);
        }
    }

    let mut spans: BTreeMap<String, (i32, i32)> = BTreeMap::new();
    for (domain, year) in active.keys() {
        let span = spans.entry(domain.clone()).or_insert((*year, *year));
        span.0 = span.0.min(*year);
        span.1 = span.1.max(*year);
    }
    let mut rows = Vec::new();
    for (domain, (first, last)) in spans {
        for year in first..=last {
            let key = (domain.clone(), year);
            rows.push(ActivityRow {
                domain: domain.clone(),
                year,
                active: active.get(&key).map_or(0, BTreeSet::len),
                sota_reporting: sota.get(&key).map_or(0, BTreeSet::len),
            });
        }
    }
    rows
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptiveRow {
    pub domain: String,
    pub benchmarks_with_results: usize,
    pub benchmarks_three_dates: usize,
    pub tasks_with_results: usize,
    pub tasks_three_dates: usize,
}

fn percent(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

impl DescriptiveRow {
    pub fn benchmarks_three_dates_pct(&self) -> f64 {
        percent(self.benchmarks_three_dates, self.benchmarks_with_results)
    }

    pub fn tasks_three_dates_pct(&self) -> f64 {
        percent(self.tasks_three_dates, self.tasks_with_results)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptiveTable {
    pub rows: Vec<DescriptiveRow>,
    pub total: DescriptiveRow,
}

/// Benchmark and task counts per domain.
///
/// A task counts towards the three-date column when at least one of its
/// benchmarks has results on three or more distinct dates.
pub fn descriptive_stats(records: &[ResultRecord], hierarchy: &TaskHierarchy) -> DescriptiveTable {
    let tasks = benchmark_tasks(records);
    let mut per_domain: BTreeMap<String, [BTreeSet<&str>; 4]> = BTreeMap::new();
    let mut total: [BTreeSet<&str>; 4] = Default::default();
    for (benchmark, group) in group_by_benchmark(records) {
        let task = tasks[benchmark].as_str();
        let domain = hierarchy.domain_of(task).to_string();
        let eligible = map_eligible(group.iter().copied());
        for sets in [per_domain.entry(domain).or_default(), &mut total] {
            sets[0].insert(benchmark);
            sets[2].insert(task);
            if eligible {
                sets[1].insert(benchmark);
                sets[3].insert(task);
            }
        }
    }
    let row = |domain: String, sets: &[BTreeSet<&str>; 4]| DescriptiveRow {
        domain,
        benchmarks_with_results: sets[0].len(),
        benchmarks_three_dates: sets[1].len(),
        tasks_with_results: sets[2].len(),
        tasks_three_dates: sets[3].len(),
    };
    DescriptiveTable {
        rows: per_domain.iter().map(|(d, s)| row(d.clone(), s)).collect(),
        total: row("Total".into(), &total),
    }
}
