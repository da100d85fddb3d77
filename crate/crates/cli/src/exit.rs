//! Error classes and their process exit codes.

use std::path::PathBuf;

pub const EXIT_OTHER: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_MISSING_INPUT: u8 = 3;
pub const EXIT_SCHEMA: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("input not found: {}", .0.display())]
    MissingInput(PathBuf),
    #[error("schema error: {0}")]
    Schema(String),
}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CliError>() {
            return match e {
                CliError::Config(_) => EXIT_CONFIG,
                CliError::MissingInput(_) => EXIT_MISSING_INPUT,
                CliError::Schema(_) => EXIT_SCHEMA,
            };
        }
        if let Some(e) = cause.downcast_ref::<benchdyn::Error>() {
            use benchdyn::Error::*;
            return match e {
                InvalidConfig(_) | UnknownFormat(_) => EXIT_CONFIG,
                Parse { .. } | HierarchyCycle { .. } | DuplicatePolarity(_) | MissingPolarity(_) | UnmappedBenchmark(_)
                | UnknownAttribute(_) | DimensionMismatch { .. } | Csv(_) | Json(_) => EXIT_SCHEMA,
                _ => EXIT_OTHER,
            };
        }
    }
    EXIT_OTHER
}
