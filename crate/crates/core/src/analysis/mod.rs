//! Downstream statistics on fitted subject factors.

mod direction;
mod ridge;
mod stats;
mod traits;

pub use direction::{
    cca_direction, delta_network, lda_direction, threshold_top, DeltaNetwork, Edge, Scaling,
};
pub use ridge::{
    cv_lambda, prediction_study, ridge_predict, Penalty, PredictionConfig, PredictionStudy,
    RidgeModel, RidgePrediction, TraitPrediction, LAMBDA_GRID, MIN_STUDY_SUBJECTS,
};
pub use stats::{
    fdr_adjust, mmd_test, quartile_groups, variance_explained, FdrResult, MmdResult, QuartileGroups,
};
pub use traits::{Trait, TraitKind, TraitTable};
