//! Leaderboard export ingestion: result records, the task class hierarchy and
//! metric polarity curation.

mod hierarchy;
mod polarity;
mod records;

pub use hierarchy::{parse_task_hierarchy, TaskHierarchy, UNCLASSIFIED};
pub use polarity::{
    apply_polarity, detect_polarity_conflicts, load_polarity_table, ConflictEvidence,
    ConflictReason, Polarity, PolarityConflict, PolarityTable, Provenance,
    DEFAULT_NEGATIVE_KEYWORDS, MINORITY_TREND_THRESHOLD,
};
pub use records::{
    parse_numeric_value, parse_result_records, write_result_records, LineError, ParseReport,
    ResultRecord,
};
