use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("task hierarchy contains a cycle through edge {child:?} -> {parent:?}")]
    HierarchyCycle { child: String, parent: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate polarity entry for metric {0:?}")]
    DuplicatePolarity(String),

    #[error("metrics missing from polarity table: {}", .0.join(", "))]
    MissingPolarity(Vec<String>),

    #[error("benchmark {0:?} has no task mapping")]
    UnmappedBenchmark(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("trajectory has a single point and no time span")]
    NoSpan,

    #[error("year {year} precedes the first result year {first}")]
    YearBeforeFirstResult { year: i32, first: i32 },

    #[error("t statistic undefined: {0}")]
    UndefinedStatistic(&'static str),

    #[error("sample size {target} exceeds group size {available}")]
    TargetTooLarge { target: usize, available: usize },

    #[error("attribute {0:?} is not present in the table")]
    UnknownAttribute(String),

    #[error("unknown output format {0:?}")]
    UnknownFormat(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
