//! Structural alignment between vector representations of labeled text and
//! their class labels.
//!
//! The pipeline clusters a representation with Ward linkage, scores every
//! cut of the dendrogram by how well cluster label distributions predict the
//! gold labels (precision-recall area), and summarizes the resulting curve by
//! its normalized area. A budgeted learning-curve harness measures how well
//! a max-entropy classifier learns from the same representation with 100 to
//! 1000 labels, so the two summaries can be correlated. The Davies–Bouldin
//! index over the same cuts serves as a label-free baseline.

pub mod alignment;
pub mod data;
pub mod error;
pub mod grid;
pub mod harness;
pub mod hierclust;
pub mod quality;
pub mod synthetic;

pub use alignment::{alignment_curve, alignment_score, aprc, AlignmentCurve, AlignmentMode};
pub use data::{EmbeddingMatrix, LabeledDataset};
pub use error::{Error, ErrorKind, Result};
pub use grid::{GridSpec, KGrid};
pub use hierclust::{ward_linkage, Dendrogram, Partition};
pub use quality::{dbi, dbi_curve, DbiCurve};
