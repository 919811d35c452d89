//! Snapshot reduction: scaled offset snapshots, truncated SVD, DEIM and
//! variable classification.

mod classify;
mod deim;
mod partition;
mod snapshots;
mod svd;

pub use classify::classify_variables;
pub use deim::select_interpolation_indices;
pub use partition::Partition;
pub use snapshots::{assemble_snapshots, SnapshotMatrix};
pub use svd::{canonicalize_signs, truncated_svd, ReducedBasis, TruncationRule};
