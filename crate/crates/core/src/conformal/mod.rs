//! Split-conformal prediction on top of similarity profiles.
//!
//! Scores turn a profile into per-label nonconformity, calibrators turn
//! calibration scores into thresholds, and [`PredictionSet`] applies them.

mod calibration;
mod scores;
mod sets;

pub use calibration::{
    calibrate_conditional, calibrate_marginal, check_alpha, conformal_quantile, quantile_rank,
    Calibrator, ConditionalCalibrator, MarginalCalibrator,
};
pub use scores::{
    inverse_quantile_score, label_scores, nonconformity, softmax, CumulativeOrder, ScoreKind,
    DEFAULT_PENALTY, DEFAULT_TEMPERATURE,
};
pub use sets::{
    min_score, ood_score, predict_point, predict_set_conditional, predict_set_marginal,
    set_from_profile, PredictionSet,
};
