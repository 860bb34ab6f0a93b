//! Deterministic in-process cluster. Each stage runs one task per worker
//! and records the bytes every worker received and the work it did.

mod config;
mod layout;
mod ledger;
mod runtime;
mod shuffle;
pub mod wire;

pub use config::ClusterConfig;
pub use layout::{
    block_distribute, grouped_class_assignment, scatter_round_robin, split_even, split_ranges,
    triangle_self_join, BlockTask, Chunk, TriangleLayout, TriangleTask,
};
pub use ledger::{CostLedger, StageCost, StageReport};
pub use runtime::{BroadcastHandle, Cluster, Shipment, WorkerCtx};
pub use shuffle::{distributed_group_by, distributed_group_by_many, hash_codes, mix64};
