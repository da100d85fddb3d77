//! Benchmark dynamics analytics.
//!
//! Turns leaderboard result exports into state-of-the-art (SOTA) trajectories,
//! relative-improvement maps, shape clusters, benchmark lifecycle tables,
//! dataset popularity statistics and repository coverage estimates.
//!
//! The pipeline is organised bottom-up:
//!
//! - [`ingest`]: result records, task hierarchy, metric polarity.
//! - [`sota`]: trajectory extraction, relative improvement, activity counts, task-month maps.
//! - [`preprocess`]: daily forward fill, min-max normalisation, fixed-length resampling.
//! - [`cluster`]: self-organizing map training and gold-function matching.
//! - [`lifecycle`]: per benchmark-year lifecycle states.
//! - [`ecosystem`]: popularity rankings, Welch t-tests, coverage arithmetic.
//! - [`report`]: CSV / JSON / SVG emitters.

pub mod cluster;
pub mod ecosystem;
mod error;
pub mod ingest;
pub mod lifecycle;
pub mod preprocess;
pub mod report;
pub mod rng;
pub mod sota;

pub use error::{Error, Result};
