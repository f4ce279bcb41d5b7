//! Label alignment of dendrogram partitions and the area under the
//! alignment curve.

mod aprc;
mod curve;
mod scores;

pub use aprc::aprc;
pub use curve::{
    alignment_curve, alignment_score, sam_area, AlignmentCurve, AlignmentMode, CurvePoint,
};
pub use scores::{cluster_scores, ScoreTable};
