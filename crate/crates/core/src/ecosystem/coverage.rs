use serde::{Deserialize, Serialize};

use super::stats::normal_quantile;
use crate::{Error, Result};

/// Sample size for estimating a proportion within `margin_of_error` at the
/// given two-sided `confidence`, with finite-population correction and the
/// worst-case proportion 0.5.
pub fn required_sample_size(population: u64, margin_of_error: f64, confidence: f64) -> Result<u64> {
    if population == 0 {
        return Err(Error::InvalidConfig("population must be at least 1".into()));
    }
    if !(margin_of_error > 0.0 && margin_of_error < 1.0) {
        return Err(Error::InvalidConfig(format!("margin of error must be in (0, 1), got {margin_of_error}")));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidConfig(format!("confidence must be in (0, 1), got {confidence}")));
    }
    let z = normal_quantile(1.0 - (1.0 - confidence) / 2.0);
    let base = z * z * 0.25;
    let n = population as f64;
    let size = n * base / ((n - 1.0) * margin_of_error * margin_of_error + base);
    Ok(size.ceil() as u64)
}

/// Extrapolated share of SOTA-reporting papers captured by a repository.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    pub corpus_size: u64,
    pub sample_size: u64,
    pub sota_in_sample: u64,
    pub repository_sota_papers: u64,
    pub sota_rate: f64,
    pub estimated_sota_papers: f64,
    pub coverage: f64,
}

impl CoverageEstimate {
    /// True when the repository holds more SOTA papers than the extrapolation predicts.
    pub fn exceeds_estimate(&self) -> bool {
        self.coverage > 1.0
    }
}

/// `s` SOTA papers in a sample of `n` from a corpus of `t`, of which the
/// repository captured `c`.
pub fn coverage_estimate(s: u64, n: u64, t: u64, c: u64) -> Result<CoverageEstimate> {
    if n == 0 || t == 0 {
        return Err(Error::InvalidConfig("sample and corpus sizes must be at least 1".into()));
    }
    if s > n {
        return Err(Error::InvalidConfig(format!("sample SOTA count {s} exceeds sample size {n}")));
    }
    if s == 0 {
        return Err(Error::UndefinedStatistic("no SOTA papers in sample, coverage is undefined"));
    }
    let sota_rate = s as f64 / n as f64;
    let estimated = sota_rate * t as f64;
    Ok(CoverageEstimate {
        corpus_size: t,
        sample_size: n,
        sota_in_sample: s,
        repository_sota_papers: c,
        sota_rate,
        estimated_sota_papers: estimated,
        coverage: c as f64 / estimated,
    })
}
