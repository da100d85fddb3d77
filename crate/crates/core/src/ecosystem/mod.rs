//! Dataset popularity, top-vs-bottom attribute comparison and repository
//! coverage arithmetic.

mod attributes;
mod coverage;
mod popularity;
pub mod stats;

pub use attributes::{
    compare_all, compare_attribute, load_attribute_table, AttributeKind, AttributeRow, AttributeTable,
    ComparisonRow, Group, GroupSummary,
};
pub use coverage::{coverage_estimate, required_sample_size, CoverageEstimate};
pub use popularity::{
    equal_share_fraction, sample_popularity_groups, split_equal_utilization, subsample_to_match,
    utilization_ranking, DatasetCount, PopularityRanking, PopularitySplit,
};
pub use stats::{welch_t_test, Alternative, WelchResult};
