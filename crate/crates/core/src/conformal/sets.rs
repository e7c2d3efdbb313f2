//! Prediction sets, their point-valued trimming, and the OOD statistic.

use serde::{Deserialize, Serialize};

use super::calibration::Calibrator;
use super::scores::{label_scores, ScoreKind};
use crate::classifier::{argmin, TrainedModel};
use crate::encoders::Features;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionSet {
    /// Included labels, ascending.
    pub labels: Vec<usize>,
    /// Nonconformity of every label in `[K]`, not just the included ones.
    pub scores: Vec<f64>,
}

impl PredictionSet {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, y: usize) -> bool {
        self.labels.binary_search(&y).is_ok()
    }

    /// `{y : S(y) ≤ threshold(y)}`.
    pub fn from_scores(scores: Vec<f64>, threshold: impl Fn(usize) -> f64) -> Self {
        let labels = (0..scores.len())
            .filter(|&y| scores[y] <= threshold(y))
            .collect();
        Self { labels, scores }
    }

    /// Trims to at most one label: the lowest-scoring member, or the global
    /// argmin when the set is empty and abstention is not allowed.
    pub fn into_point(self, allow_empty: bool) -> Self {
        let labels = match self.labels.len() {
            1 => self.labels,
            0 if allow_empty => Vec::new(),
            0 => vec![argmin(&self.scores)],
            _ => {
                let member_scores: Vec<f64> = self.labels.iter().map(|&y| self.scores[y]).collect();
                vec![self.labels[argmin(&member_scores)]]
            }
        };
        Self {
            labels,
            scores: self.scores,
        }
    }

    pub fn point(&self) -> Option<usize> {
        match self.labels.as_slice() {
            [y] => Some(*y),
            _ => None,
        }
    }
}

/// Set from a precomputed similarity profile.
pub fn set_from_profile(profile: &[f64], calibrator: &Calibrator, u: f64) -> Result<PredictionSet> {
    let scores = label_scores(profile, calibrator.kind(), u)?;
    Ok(PredictionSet::from_scores(scores, |y| calibrator.threshold(y)))
}

fn predict_set(model: &TrainedModel, calibrator: &Calibrator, x: &Features, u: f64) -> Result<PredictionSet> {
    set_from_profile(&model.similarity_profile(x)?, calibrator, u)
}

/// Marginal set; `u` is the inverse-quantile draw and is otherwise ignored.
/// The score kind is the one the calibrator was built with.
pub fn predict_set_marginal(
    model: &TrainedModel,
    calibrator: &super::MarginalCalibrator,
    x: &Features,
    u: f64,
) -> Result<PredictionSet> {
    predict_set(model, &Calibrator::Marginal(calibrator.clone()), x, u)
}

pub fn predict_set_conditional(
    model: &TrainedModel,
    calibrator: &super::ConditionalCalibrator,
    x: &Features,
    u: f64,
) -> Result<PredictionSet> {
    predict_set(model, &Calibrator::Conditional(calibrator.clone()), x, u)
}

pub fn predict_point(
    model: &TrainedModel,
    calibrator: &Calibrator,
    x: &Features,
    u: f64,
    allow_empty: bool,
) -> Result<PredictionSet> {
    Ok(predict_set(model, calibrator, x, u)?.into_point(allow_empty))
}

/// Least nonconformity over all labels; large when no class fits.
pub fn min_score(scores: &[f64]) -> f64 {
    scores.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn ood_score(model: &TrainedModel, x: &Features, kind: ScoreKind, u: f64) -> Result<f64> {
    Ok(min_score(&label_scores(&model.similarity_profile(x)?, kind, u)?))
}

#[cfg(test)]
mod tests {
    use super::super::{calibrate_conditional, calibrate_marginal, ConditionalCalibrator};
    use super::*;

    const DISCOUNT: [f64; 3] = [-0.64, -0.01, -0.01];

    fn conditional(q: Vec<f64>) -> Calibrator {
        Calibrator::Conditional(ConditionalCalibrator {
            counts: vec![1; q.len()],
            q_hat_per_label: q,
            alpha: 0.1,
            kind: ScoreKind::Discount,
        })
    }

    #[test]
    fn marginal_sets_by_hand() {
        let full = PredictionSet::from_scores(DISCOUNT.to_vec(), |_| f64::INFINITY);
        assert_eq!(full.labels, vec![0, 1, 2]);
        assert_eq!(PredictionSet::from_scores(DISCOUNT.to_vec(), |_| -0.05).labels, vec![0]);
        assert_eq!(PredictionSet::from_scores(DISCOUNT.to_vec(), |_| -0.005).labels, vec![0, 1, 2]);
    }

    #[test]
    fn conditional_sets_by_hand() {
        let c = conditional(vec![-0.05, -0.005, -1.0]);
        let set = PredictionSet::from_scores(DISCOUNT.to_vec(), |y| c.threshold(y));
        assert_eq!(set.labels, vec![0, 1]);
        let profile = [0.8, 0.1, 0.1];
        assert_eq!(set_from_profile(&profile, &c, 0.0).unwrap().labels, vec![0, 1]);
        let equal = conditional(vec![-0.05; 3]);
        let marginal: Calibrator = calibrate_marginal(&[-0.05], 0.6, ScoreKind::Discount).unwrap().into();
        assert_eq!(marginal.threshold(0), -0.05);
        assert_eq!(
            set_from_profile(&profile, &equal, 0.0).unwrap(),
            set_from_profile(&profile, &marginal, 0.0).unwrap()
        );
        let inf = calibrate_conditional(&[], 0.1, 3, ScoreKind::Discount).unwrap().into();
        assert_eq!(set_from_profile(&profile, &inf, 0.0).unwrap().len(), 3);
    }

    #[test]
    fn point_trimming() {
        let set = PredictionSet {
            labels: vec![0, 2],
            scores: vec![-0.64, -0.9, -0.2],
        };
        assert_eq!(set.into_point(false).labels, vec![0]);
        let empty = PredictionSet {
            labels: vec![],
            scores: DISCOUNT.to_vec(),
        };
        assert!(empty.clone().into_point(true).is_empty());
        assert_eq!(empty.into_point(false).point(), Some(0));
        let tie = PredictionSet {
            labels: vec![1, 2],
            scores: DISCOUNT.to_vec(),
        };
        assert_eq!(tie.into_point(false).point(), Some(1));
    }

    #[test]
    fn ood_statistic_is_the_minimum() {
        assert_eq!(min_score(&DISCOUNT), -0.64);
        let s = label_scores(&[1e-9, 1e-9, 1e-9], ScoreKind::Discount, 0.0).unwrap();
        assert!(min_score(&s) > -1e-9);
        for v in &DISCOUNT {
            assert!(min_score(&DISCOUNT) <= *v);
        }
    }
}
