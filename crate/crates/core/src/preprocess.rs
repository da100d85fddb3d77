//! Turns irregular SOTA trajectories into fixed-length vectors in `[0, 1]`.
//!
//! The pipeline order is fixed: daily forward fill, min-max normalisation,
//! then resampling onto [`TARGET_LEN`] samples.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::sota::SotaTrajectory;
use crate::{Error, Result};

/// Length of every normalized trajectory.
pub const TARGET_LEN: usize = 1200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedTrajectory {
    /// `benchmark::metric` for SOTA series, `gold:<name>` for gold functions.
    pub source_id: String,
    pub vector: Vec<f64>,
}

pub fn series_id(benchmark_id: &str, metric_name: &str) -> String {
    format!("{benchmark_id}::{metric_name}")
}

/// One value per day from the first to the last SOTA date, forward filled.
pub fn resample_daily(traj: &SotaTrajectory) -> Result<Vec<(i64, f64)>> {
    if traj.points.len() < 2 {
        return Err(Error::NoSpan);
    }
    let start = traj.first_date();
    let days = traj.span_days();
    let mut out = Vec::with_capacity(days as usize + 1);
    let mut next = 0;
    let mut current = traj.points[0].value;
    for day in 0..=days {
        while next < traj.points.len() && (traj.points[next].date - start).num_days() <= day {
            current = traj.points[next].value;
            next += 1;
        }
        out.push((day, current));
    }
    Ok(out)
}

/// Min-max scaling onto `[0, 1]`; a constant series maps to all zeros.
pub fn minmax_normalize(series: &[f64]) -> Vec<f64> {
    let min = series.iter().copied().fold(f64::INFINITY, f64::min);
    let max = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    if range.is_nan() || range <= 0.0 {
        return vec![0.0; series.len()];
    }
    series.iter().map(|v| (v - min) / range).collect()
}

/// Resamples onto exactly `target` points.
///
/// Shorter inputs are stretched piecewise-constant (sample `j` holds input
/// `floor(j * len / target)`). Longer inputs are decimated with both
/// endpoints pinned (`floor(j * (len - 1) / (target - 1))`), so the first
/// and last values always survive.
pub fn to_fixed_length(series: &[f64], target: usize) -> Vec<f64> {
    let len = series.len();
    if len == 0 || target == 0 {
        return Vec::new();
    }
    (0..target)
        .map(|j| {
            let idx = if len <= target {
                j * len / target
            } else if target == 1 {
                0
            } else {
                j * (len - 1) / (target - 1)
            };
            series[idx]
        })
        .collect()
}

/// Full pipeline for one SOTA trajectory.
pub fn normalize_trajectory(traj: &SotaTrajectory) -> Result<NormalizedTrajectory> {
    let daily: Vec<f64> = resample_daily(traj)?.into_iter().map(|(_, v)| v).collect();
    Ok(NormalizedTrajectory {
        source_id: series_id(&traj.benchmark_id, &traj.metric_name),
        vector: to_fixed_length(&minmax_normalize(&daily), TARGET_LEN),
    })
}

/// Writes one CSV row per trajectory: `source_id,v0,...,v1199`.
pub fn write_vectors<W: Write>(vectors: &[NormalizedTrajectory], writer: W) -> Result<()> {
    let mut csv = csv::WriterBuilder::new().has_headers(false).flexible(true).from_writer(writer);
    for v in vectors {
        let mut row = Vec::with_capacity(v.vector.len() + 1);
        row.push(v.source_id.clone());
        row.extend(v.vector.iter().map(|x| x.to_string()));
        csv.write_record(&row)?;
    }
    csv.flush()?;
    Ok(())
}

pub fn read_vectors<R: Read>(reader: R) -> Result<Vec<NormalizedTrajectory>> {
    let mut csv = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(reader);
    let mut out = Vec::new();
    for (idx, row) in csv.records().enumerate() {
        let row = row?;
        let mut fields = row.iter();
        let source_id = fields.next().unwrap_or("").to_string();
        let vector = fields
            .map(|f| {
                f.parse::<f64>().map_err(|e| Error::Parse {
                    line: idx + 1,
                    message: format!("bad vector value {f:?}: {e}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        out.push(NormalizedTrajectory { source_id, vector });
    }
    Ok(out)
}
