//! Experiment harness: folds, label noise, cross-validation and statistics.

mod cv;
mod folds;
mod noise;
mod stats;

pub use cv::{
    cross_validate, cross_validate_balls, EvalReport, FitStats, FoldOutcome, GranularBallLearner,
    KnnGridLearner, Learner, Model, KNN_GRID,
};
pub use folds::{stratified_kfold, Fold};
pub use noise::inject_label_noise;
pub use stats::{lnt, mean, sample_sd, wilcoxon_signed_rank, WilcoxonResult, WILCOXON_T_CRITICAL_N20};
