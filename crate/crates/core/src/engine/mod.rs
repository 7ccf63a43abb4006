//! Tree growth under delayed preferential attachment.

mod export;
mod fenwick;
mod grow;
mod sampler;
mod trace;

pub use export::{read_edge_list, write_edge_list};
pub use fenwick::Fenwick;
pub use grow::{grow, grow_with_rng, grow_with_stats, SamplerStats};
pub use sampler::{
    affine_distribution, rejection_distribution, sample_parent_affine, sample_parent_rejection,
    sample_parent_scan, scan_distribution, SnapshotIndex,
};
pub use trace::TreeTrace;
