use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::som::euclidean;
use crate::preprocess::{minmax_normalize, to_fixed_length, NormalizedTrajectory, TARGET_LEN};
use crate::{Error, Result};

/// Number of integer points each gold function is evaluated on.
pub const GOLD_DOMAIN_LEN: usize = 50;

/// Analytic trajectory shapes used as similarity targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GoldFunction {
    /// `f(x) = x` on `1..=50`.
    LinearGrowth,
    /// `f(x) = 1 - 1/x` on `1..=50`.
    EarlySaturation,
    /// `f(x) = -1/x` on `-50..=-1`.
    StagnationBurst,
}

impl GoldFunction {
    pub const ALL: [GoldFunction; 3] = [Self::LinearGrowth, Self::EarlySaturation, Self::StagnationBurst];

    pub fn name(self) -> &'static str {
        match self {
            Self::LinearGrowth => "linear",
            Self::EarlySaturation => "saturation",
            Self::StagnationBurst => "burst",
        }
    }

    /// Raw function values over the integer domain, in domain order.
    pub fn samples(self) -> Vec<f64> {
        let n = GOLD_DOMAIN_LEN as i32;
        match self {
            Self::LinearGrowth => (1..=n).map(f64::from).collect(),
            Self::EarlySaturation => (1..=n).map(|x| 1.0 - 1.0 / f64::from(x)).collect(),
            Self::StagnationBurst => (-n..=-1).map(|x| -1.0 / f64::from(x)).collect(),
        }
    }
}

impl fmt::Display for GoldFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GoldFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "linear" | "lineargrowth" => Ok(Self::LinearGrowth),
            "saturation" | "earlysaturation" => Ok(Self::EarlySaturation),
            "burst" | "stagnationburst" => Ok(Self::StagnationBurst),
            _ => Err(Error::InvalidConfig(format!(
                "unknown gold function {s:?} (expected linear, saturation or burst)"
            ))),
        }
    }
}

/// Gold function run through the same normalisation and resampling as SOTA series.
pub fn gold_trajectory(g: GoldFunction) -> NormalizedTrajectory {
    NormalizedTrajectory {
        source_id: format!("gold:{}", g.name()),
        vector: to_fixed_length(&minmax_normalize(&g.samples()), TARGET_LEN),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldMatch {
    pub rank: usize,
    pub source_id: String,
    pub distance: f64,
}

/// The `k` trajectories closest to a gold function by Euclidean distance,
/// ties broken by `source_id`.
pub fn rank_by_gold_distance(vectors: &[NormalizedTrajectory], gold: GoldFunction, k: usize) -> Result<Vec<GoldMatch>> {
    let reference = gold_trajectory(gold);
    let mut scored = Vec::with_capacity(vectors.len());
    for v in vectors {
        if v.vector.len() != reference.vector.len() {
            return Err(Error::DimensionMismatch { expected: reference.vector.len(), actual: v.vector.len() });
        }
        scored.push((euclidean(&v.vector, &reference.vector), v.source_id.as_str()));
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));
    Ok(scored
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, (distance, id))| GoldMatch { rank: i + 1, source_id: id.to_string(), distance })
        .collect())
}
