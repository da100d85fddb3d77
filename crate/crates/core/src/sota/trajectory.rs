use std::collections::BTreeSet;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::group_by_series;
use crate::ingest::ResultRecord;
use crate::{Error, Result};

/// Minimum number of SOTA points for shape clustering.
pub const CLUSTER_MIN_POINTS: usize = 5;
/// Minimum span in days between first and last SOTA point for shape clustering.
pub const CLUSTER_MIN_SPAN_DAYS: i64 = 365;
/// Minimum number of distinct result dates for a benchmark to appear on maps.
pub const MAP_MIN_DISTINCT_DATES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SotaPoint {
    pub date: NaiveDate,
    pub value: f64,
}

/// Running-maximum subsequence of one (benchmark, metric) result series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SotaTrajectory {
    pub benchmark_id: String,
    pub metric_name: String,
    pub points: Vec<SotaPoint>,
    pub anchor: f64,
    pub maximum: f64,
    pub n_results_total: usize,
    pub n_distinct_dates: usize,
}

impl SotaTrajectory {
    pub fn first_date(&self) -> NaiveDate {
        self.points[0].date
    }

    pub fn last_date(&self) -> NaiveDate {
        self.points[self.points.len() - 1].date
    }

    pub fn span_days(&self) -> i64 {
        (self.last_date() - self.first_date()).num_days()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeImprovement {
    pub benchmark_id: String,
    pub metric_name: String,
    pub date: NaiveDate,
    pub r: f64,
}

/// Collapses same-day results to the best one and sorts by date.
pub fn daily_best<'a, I>(records: I) -> Vec<&'a ResultRecord>
where
    I: IntoIterator<Item = &'a ResultRecord>,
{
    let mut sorted: Vec<&ResultRecord> = records.into_iter().collect();
    sorted.sort_by(|a, b| a.date.cmp(&b.date).then(b.value.total_cmp(&a.value)));
    sorted.dedup_by(|later, earlier| later.date == earlier.date);
    sorted
}

/// Extracts the SOTA trajectory of one (benchmark, metric) series.
///
/// Records must already be polarity-normalized. A point is kept when its
/// value strictly exceeds every earlier value; the first day's best result
/// is always kept as the anchor.
pub fn extract_sota_trajectory<'a, I>(records: I) -> Result<SotaTrajectory>
where
    I: IntoIterator<Item = &'a ResultRecord>,
{
    let all: Vec<&ResultRecord> = records.into_iter().collect();
    let first = *all.first().ok_or(Error::EmptyInput("trajectory records"))?;
    if all
        .iter()
        .any(|r| r.benchmark_id != first.benchmark_id || r.metric_name != first.metric_name)
    {
        return Err(Error::Invariant(
            "trajectory records must share one benchmark and metric".into(),
        ));
    }
    let n_results_total = all.len();
    let days = daily_best(all);

    let mut points: Vec<SotaPoint> = Vec::new();
    for r in &days {
        if points.last().is_none_or(|p| r.value > p.value) {
            points.push(SotaPoint { date: r.date, value: r.value });
        }
    }
    Ok(SotaTrajectory {
        benchmark_id: first.benchmark_id.clone(),
        metric_name: first.metric_name.clone(),
        anchor: points[0].value,
        maximum: points[points.len() - 1].value,
        points,
        n_results_total,
        n_distinct_dates: days.len(),
    })
}

/// Trajectories for every (benchmark, metric) pair, ordered by key.
pub fn extract_all_trajectories(records: &[ResultRecord]) -> Vec<SotaTrajectory> {
    group_by_series(records)
        .into_values()
        .map(|group| extract_sota_trajectory(group).expect("grouped series are nonempty and homogeneous"))
        .collect()
}

pub fn clustering_eligible(traj: &SotaTrajectory) -> bool {
    traj.points.len() >= CLUSTER_MIN_POINTS && traj.span_days() >= CLUSTER_MIN_SPAN_DAYS
}

/// True when the benchmark's results (any metric) fall on at least three distinct dates.
pub fn map_eligible<'a, I>(records: I) -> bool
where
    I: IntoIterator<Item = &'a ResultRecord>,
{
    let dates: BTreeSet<NaiveDate> = records.into_iter().map(|r| r.date).collect();
    dates.len() >= MAP_MIN_DISTINCT_DATES
}

/// Stepwise SOTA gains divided by the total span `maximum - anchor`.
///
/// The anchor itself has no entry, so a single-point trajectory yields an
/// empty list. The entries of a longer trajectory telescope to one.
pub fn relative_improvements(traj: &SotaTrajectory) -> Vec<RelativeImprovement> {
    let span = traj.maximum - traj.anchor;
    traj.points
        .windows(2)
        .map(|w| RelativeImprovement {
            benchmark_id: traj.benchmark_id.clone(),
            metric_name: traj.metric_name.clone(),
            date: w[1].date,
            r: (w[1].value - w[0].value) / span,
        })
        .collect()
}
