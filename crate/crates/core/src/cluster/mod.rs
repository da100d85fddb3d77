//! Shape clustering of normalized trajectories with a self-organizing map,
//! and similarity ranking against analytic gold functions.

mod gold;
mod som;

pub use gold::{gold_trajectory, rank_by_gold_distance, GoldFunction, GoldMatch, GOLD_DOMAIN_LEN};
pub use som::{
    assign_cluster, euclidean, partition_purity, quantization_error, read_model, train_som, write_model,
    SomConfig, SomInit, SomModel,
};
