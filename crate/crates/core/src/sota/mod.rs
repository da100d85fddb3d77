//! SOTA trajectory extraction and the statistics built on top of it.

mod map;
mod stats;
mod trajectory;

use std::collections::BTreeMap;

use crate::ingest::ResultRecord;

pub use map::{aggregate_task_month, build_sota_map, month_key, GridCell, SotaMapGrid};
pub use stats::{activity_counts, descriptive_stats, ActivityRow, DescriptiveRow, DescriptiveTable};
pub use trajectory::{
    clustering_eligible, daily_best, extract_all_trajectories, extract_sota_trajectory, map_eligible,
    relative_improvements, RelativeImprovement, SotaPoint, SotaTrajectory,
};

/// Maps each benchmark to a single task. Benchmarks reported under several
/// task names resolve to the alphabetically first one.
pub fn benchmark_tasks(records: &[ResultRecord]) -> BTreeMap<String, String> {
    let mut out: BTreeMap<String, String> = BTreeMap::new();
    for r in records {
        out.entry(r.benchmark_id.clone())
            .and_modify(|t| {
                if r.task_name < *t {
                    *t = r.task_name.clone();
                }
            })
            .or_insert_with(|| r.task_name.clone());
    }
    out
}

/// Groups records by benchmark, preserving input order inside each group.
pub fn group_by_benchmark(records: &[ResultRecord]) -> BTreeMap<&str, Vec<&ResultRecord>> {
    let mut out: BTreeMap<&str, Vec<&ResultRecord>> = BTreeMap::new();
    for r in records {
        out.entry(r.benchmark_id.as_str()).or_default().push(r);
    }
    out
}

/// Groups records by (benchmark, metric).
pub fn group_by_series(records: &[ResultRecord]) -> BTreeMap<(&str, &str), Vec<&ResultRecord>> {
    let mut out: BTreeMap<(&str, &str), Vec<&ResultRecord>> = BTreeMap::new();
    for r in records {
        out.entry((r.benchmark_id.as_str(), r.metric_name.as_str())).or_default().push(r);
    }
    out
}
