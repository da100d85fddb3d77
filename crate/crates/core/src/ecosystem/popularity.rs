use std::collections::{BTreeMap, BTreeSet};

use chrono::{Datelike, NaiveDate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ingest::ResultRecord;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetCount {
    pub dataset_name: String,
    pub papers: usize,
}

/// Datasets ranked by the number of distinct papers reporting results on them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopularityRanking {
    pub cohort_year: Option<i32>,
    /// Sorted by descending paper count, ties by name.
    pub entries: Vec<DatasetCount>,
    /// Equal-utilization split index, present when the ranking has two or more entries.
    pub split_index: Option<usize>,
}

impl PopularityRanking {
    pub fn counts(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.papers).collect()
    }

    pub fn from_counts(cohort_year: Option<i32>, mut entries: Vec<DatasetCount>) -> Self {
        entries.sort_by(|a, b| b.papers.cmp(&a.papers).then_with(|| a.dataset_name.cmp(&b.dataset_name)));
        let split_index = (entries.len() >= 2).then(|| best_split(&entries.iter().map(|e| e.papers).collect::<Vec<_>>()));
        Self { cohort_year, entries, split_index }
    }
}

/// Counts distinct papers per dataset.
///
/// With a cohort year only datasets whose earliest result falls in that
/// year are ranked.
pub fn utilization_ranking(records: &[ResultRecord], cohort_year: Option<i32>) -> PopularityRanking {
    let mut papers: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    let mut first_seen: BTreeMap<&str, NaiveDate> = BTreeMap::new();
    for r in records {
        papers.entry(&r.dataset_name).or_default().insert(&r.paper_id);
        let first = first_seen.entry(&r.dataset_name).or_insert(r.date);
        *first = (*first).min(r.date);
    }
    let entries = papers
        .into_iter()
        .filter(|(d, _)| cohort_year.is_none_or(|y| first_seen[d].year() == y))
        .map(|(d, p)| DatasetCount { dataset_name: d.to_string(), papers: p.len() })
        .collect();
    PopularityRanking::from_counts(cohort_year, entries)
}

/// Smallest fraction of top-ranked datasets whose paper counts reach half the total.
pub fn equal_share_fraction(ranking: &PopularityRanking) -> Result<f64> {
    let counts = ranking.counts();
    if counts.is_empty() {
        return Err(Error::EmptyInput("popularity ranking"));
    }
    let total: usize = counts.iter().sum();
    let mut prefix = 0;
    for (m, c) in counts.iter().enumerate() {
        prefix += c;
        if 2 * prefix >= total {
            return Ok((m + 1) as f64 / counts.len() as f64);
        }
    }
    Ok(1.0)
}

fn best_split(counts: &[usize]) -> usize {
    let total: i128 = counts.iter().map(|c| *c as i128).sum();
    let mut prefix: i128 = 0;
    let mut best = (1, i128::MAX);
    for (k, c) in counts.iter().enumerate().take(counts.len() - 1) {
        prefix += *c as i128;
        let gap = (2 * prefix - total).abs();
        if gap < best.1 {
            best = (k + 1, gap);
        }
    }
    best.0
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopularitySplit {
    /// Most utilized datasets, the head of the ranking.
    pub top: Vec<DatasetCount>,
    /// The long tail.
    pub bottom: Vec<DatasetCount>,
    pub k: usize,
}

/// Splits the ranking at the index that best balances summed utilization
/// between head and tail; ties go to the smaller index.
pub fn split_equal_utilization(ranking: &PopularityRanking) -> Result<PopularitySplit> {
    if ranking.entries.len() < 2 {
        return Err(Error::EmptyInput("popularity split needs at least two datasets"));
    }
    let k = best_split(&ranking.counts());
    Ok(PopularitySplit {
        top: ranking.entries[..k].to_vec(),
        bottom: ranking.entries[k..].to_vec(),
        k,
    })
}

/// Uniform random subset without replacement, kept in input order.
pub fn subsample_to_match<T: Clone>(group: &[T], target_size: usize, seed: u64) -> Result<Vec<T>> {
    if target_size > group.len() {
        return Err(Error::TargetTooLarge { target: target_size, available: group.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, group.len(), target_size).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| group[i].clone()).collect())
}

/// Top and bottom lists of at most `list_size` datasets each.
///
/// The tail is first subsampled to the size of the head; the top list takes
/// the head's first entries and the bottom list the least utilized entries
/// of the subsample.
pub fn sample_popularity_groups(
    ranking: &PopularityRanking,
    list_size: usize,
    seed: u64,
) -> Result<(Vec<DatasetCount>, Vec<DatasetCount>)> {
    let split = split_equal_utilization(ranking)?;
    let matched = if split.bottom.len() > split.top.len() {
        subsample_to_match(&split.bottom, split.top.len(), seed)?
    } else {
        split.bottom
    };
    let top = split.top.into_iter().take(list_size).collect();
    let skip = matched.len().saturating_sub(list_size);
    let bottom = matched.into_iter().skip(skip).collect();
    Ok((top, bottom))
}
