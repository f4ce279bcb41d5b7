//! Agglomerative Ward clustering and flat cuts of the resulting tree.

mod dendrogram;
mod ward;

pub use dendrogram::{Dendrogram, Merge, Partition};
pub use ward::ward_linkage;
