//! Budgeted learning curves with a max-entropy classifier, and the
//! correlation used to compare them with alignment areas.

mod learning;
mod maxent;
mod metrics;
mod stats;

pub use learning::{
    cell_seed, cv_folds, learning_curve, learning_curve_with_split, CellRecord, ExperimentConfig,
    Fold, LearningCurve, LearningCurveRun, LearningPoint, TrainTestSplit,
};
pub use maxent::{
    train_maxent, MaxEntModel, MaxEntObjective, GRADIENT_TOLERANCE, MAX_ITERATIONS,
};
pub use metrics::{accuracy, evaluate, f1, Metric};
pub use stats::{mean, pearson, sample_std};
