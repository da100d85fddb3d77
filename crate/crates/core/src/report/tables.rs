use crate::cluster::GoldMatch;
use crate::ecosystem::{ComparisonRow, DatasetCount, PopularityRanking};
use crate::ingest::{ConflictReason, LineError, PolarityConflict};
use crate::lifecycle::{BenchmarkYear, StateCount};
use crate::sota::{ActivityRow, DescriptiveTable, RelativeImprovement, SotaMapGrid, SotaTrajectory};
use crate::{Error, Result};

use super::ClusterAssignment;

fn render<F>(header: &[&str], fill: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    fill(&mut w)?;
    let bytes = w.into_inner().map_err(|e| Error::Invariant(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Invariant(e.to_string()))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `task,month,anchors,max_r`, one row per non-empty cell; `max_r` is blank without an improvement.
pub fn sota_map_csv(grid: &SotaMapGrid) -> Result<String> {
    render(&["task", "month", "anchors", "max_r"], |w| {
        for c in &grid.cells {
            w.write_record([c.task.as_str(), &c.month, &c.anchors.to_string(), &opt(c.max_r)])?;
        }
        Ok(())
    })
}

/// `task,year,state,count`.
pub fn lifecycle_counts_csv(counts: &[StateCount]) -> Result<String> {
    render(&["task", "year", "state", "count"], |w| {
        for c in counts {
            w.write_record([c.task.as_str(), &c.year.to_string(), c.state.as_str(), &c.count.to_string()])?;
        }
        Ok(())
    })
}

/// `benchmark_id,year,state`.
pub fn lifecycle_entries_csv(entries: &[BenchmarkYear]) -> Result<String> {
    render(&["benchmark_id", "year", "state"], |w| {
        for e in entries {
            w.write_record([e.benchmark_id.as_str(), &e.year.to_string(), e.state.as_str()])?;
        }
        Ok(())
    })
}

/// `domain,year,active,sota`.
pub fn activity_csv(rows: &[ActivityRow]) -> Result<String> {
    render(&["domain", "year", "active", "sota"], |w| {
        for r in rows {
            w.write_record([r.domain.as_str(), &r.year.to_string(), &r.active.to_string(), &r.sota_reporting.to_string()])?;
        }
        Ok(())
    })
}

/// `benchmark_id,metric_name,date,value`, one row per trajectory point.
pub fn trajectories_csv(trajectories: &[SotaTrajectory]) -> Result<String> {
    render(&["benchmark_id", "metric_name", "date", "value"], |w| {
        for t in trajectories {
            for p in &t.points {
                w.write_record([t.benchmark_id.as_str(), &t.metric_name, &p.date.to_string(), &p.value.to_string()])?;
            }
        }
        Ok(())
    })
}

/// `benchmark_id,metric_name,date,r`.
pub fn relative_improvements_csv(improvements: &[RelativeImprovement]) -> Result<String> {
    render(&["benchmark_id", "metric_name", "date", "r"], |w| {
        for i in improvements {
            w.write_record([i.benchmark_id.as_str(), &i.metric_name, &i.date.to_string(), &i.r.to_string()])?;
        }
        Ok(())
    })
}

/// `rank,source_id,distance`.
pub fn gold_matches_csv(matches: &[GoldMatch]) -> Result<String> {
    render(&["rank", "source_id", "distance"], |w| {
        for m in matches {
            w.write_record([m.rank.to_string(), m.source_id.clone(), m.distance.to_string()])?;
        }
        Ok(())
    })
}

/// `source_id,row,col`.
pub fn cluster_csv(assignments: &[ClusterAssignment]) -> Result<String> {
    render(&["source_id", "row", "col"], |w| {
        for a in assignments {
            w.write_record([a.source_id.clone(), a.row.to_string(), a.col.to_string()])?;
        }
        Ok(())
    })
}

/// `rank,dataset_name,papers,group`; group is `top` before the split index, `bottom` after.
pub fn popularity_csv(ranking: &PopularityRanking) -> Result<String> {
    render(&["rank", "dataset_name", "papers", "group"], |w| {
        for (i, e) in ranking.entries.iter().enumerate() {
            let group = match ranking.split_index {
                Some(k) if i < k => "top",
                Some(_) => "bottom",
                None => "",
            };
            w.write_record([(i + 1).to_string(), e.dataset_name.clone(), e.papers.to_string(), group.to_string()])?;
        }
        Ok(())
    })
}

/// `group,dataset_name,papers` for sampled top and bottom lists.
pub fn popularity_groups_csv(top: &[DatasetCount], bottom: &[DatasetCount]) -> Result<String> {
    render(&["group", "dataset_name", "papers"], |w| {
        for (group, list) in [("top", top), ("bottom", bottom)] {
            for d in list {
                w.write_record([group.to_string(), d.dataset_name.clone(), d.papers.to_string()])?;
            }
        }
        Ok(())
    })
}

/// `attribute,kind,top,bottom,t,df,p`; undefined tests leave the statistic columns blank.
pub fn comparison_csv(rows: &[ComparisonRow]) -> Result<String> {
    render(&["attribute", "kind", "top", "bottom", "t", "df", "p"], |w| {
        for r in rows {
            let kind = match r.kind {
                crate::ecosystem::AttributeKind::Numeric => "numeric",
                crate::ecosystem::AttributeKind::Boolean => "boolean",
            };
            w.write_record([
                r.attribute.clone(),
                kind.to_string(),
                r.top.display(),
                r.bottom.display(),
                opt(r.t),
                opt(r.df),
                opt(r.p),
            ])?;
        }
        Ok(())
    })
}

/// `domain,benchmarks,benchmarks_3_dates,benchmarks_3_dates_pct,tasks,tasks_3_dates,tasks_3_dates_pct`, closed by a total row.
pub fn descriptive_csv(table: &DescriptiveTable) -> Result<String> {
    render(
        &["domain", "benchmarks", "benchmarks_3_dates", "benchmarks_3_dates_pct", "tasks", "tasks_3_dates", "tasks_3_dates_pct"],
        |w| {
            for r in table.rows.iter().chain(std::iter::once(&table.total)) {
                w.write_record([
                    r.domain.clone(),
                    r.benchmarks_with_results.to_string(),
                    r.benchmarks_three_dates.to_string(),
                    format!("{:.1}", r.benchmarks_three_dates_pct()),
                    r.tasks_with_results.to_string(),
                    r.tasks_three_dates.to_string(),
                    format!("{:.1}", r.tasks_three_dates_pct()),
                ])?;
            }
            Ok(())
        },
    )
}

/// `metric_name,rising,falling,minority_fraction,keyword_negative,reason`.
pub fn polarity_conflicts_csv(conflicts: &[PolarityConflict]) -> Result<String> {
    render(&["metric_name", "rising", "falling", "minority_fraction", "keyword_negative", "reason"], |w| {
        for c in conflicts {
            let e = &c.evidence;
            let reason = match e.reason {
                ConflictReason::MixedTrend => "mixed_trend",
                ConflictReason::KeywordDisagreement => "keyword_disagreement",
                ConflictReason::Both => "both",
            };
            w.write_record([
                c.metric_name.clone(),
                e.rising_benchmarks.to_string(),
                e.falling_benchmarks.to_string(),
                e.minority_fraction.to_string(),
                e.keyword_negative.to_string(),
                reason.to_string(),
            ])?;
        }
        Ok(())
    })
}

/// `line,message`.
pub fn parse_errors_csv(errors: &[LineError]) -> Result<String> {
    render(&["line", "message"], |w| {
        for e in errors {
            w.write_record([e.line.to_string(), e.message.clone()])?;
        }
        Ok(())
    })
}
