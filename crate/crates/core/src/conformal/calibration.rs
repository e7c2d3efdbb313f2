//! Split-conformal thresholds from calibration scores.

use serde::{Deserialize, Serialize};

use super::scores::ScoreKind;
use crate::error::{Error, Result};

/// Thresholds are written as `null` when infinite, since JSON has no `inf`.
mod threshold {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        (v.is_finite().then_some(*v)).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }

    pub mod many {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            v.iter()
                .map(|x| x.is_finite().then_some(*x))
                .collect::<Vec<_>>()
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Ok(Vec::<Option<f64>>::deserialize(d)?
                .into_iter()
                .map(|x| x.unwrap_or(f64::INFINITY))
                .collect())
        }
    }
}

pub fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("alpha", alpha, "a real in (0, 1)"))
    }
}

/// One-based rank `⌈(1−α)(n+1)⌉`. The small slack keeps products such as
/// `0.9 · 10` from rounding up past an exact integer.
pub fn quantile_rank(n: usize, alpha: f64) -> usize {
    ((1.0 - alpha) * (n as f64 + 1.0) - 1e-9).ceil().max(1.0) as usize
}

/// The `⌈(1−α)(n+1)⌉`-th smallest score, or `+∞` when that rank exceeds `n`.
/// Expected linear time: uses selection rather than a full sort.
pub fn conformal_quantile(scores: &[f64], alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if scores.is_empty() {
        return Err(Error::Empty("calibration scores"));
    }
    if let Some(&bad) = scores.iter().find(|s| s.is_nan()) {
        return Err(Error::invalid("calibration score", bad, "a number"));
    }
    let rank = quantile_rank(scores.len(), alpha);
    if rank > scores.len() {
        return Ok(f64::INFINITY);
    }
    let mut work = scores.to_vec();
    let (_, nth, _) = work.select_nth_unstable_by(rank - 1, f64::total_cmp);
    Ok(*nth)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalCalibrator {
    #[serde(with = "threshold")]
    pub q_hat: f64,
    pub alpha: f64,
    pub n_cal: usize,
    pub kind: ScoreKind,
}

pub fn calibrate_marginal(scores: &[f64], alpha: f64, kind: ScoreKind) -> Result<MarginalCalibrator> {
    Ok(MarginalCalibrator {
        q_hat: conformal_quantile(scores, alpha)?,
        alpha,
        n_cal: scores.len(),
        kind,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalCalibrator {
    #[serde(with = "threshold::many")]
    pub q_hat_per_label: Vec<f64>,
    pub alpha: f64,
    pub counts: Vec<usize>,
    pub kind: ScoreKind,
}

/// Per-label thresholds, each from its own stratum. Labels with no
/// calibration points get `+∞`.
pub fn calibrate_conditional(
    cal: &[(f64, usize)],
    alpha: f64,
    classes: usize,
    kind: ScoreKind,
) -> Result<ConditionalCalibrator> {
    check_alpha(alpha)?;
    let mut strata = vec![Vec::new(); classes];
    for &(score, y) in cal {
        strata
            .get_mut(y)
            .ok_or(Error::LabelOutOfRange { label: y, classes })?
            .push(score);
    }
    let q_hat_per_label = strata
        .iter()
        .map(|s| {
            if s.is_empty() {
                Ok(f64::INFINITY)
            } else {
                conformal_quantile(s, alpha)
            }
        })
        .collect::<Result<_>>()?;
    Ok(ConditionalCalibrator {
        q_hat_per_label,
        alpha,
        counts: strata.iter().map(Vec::len).collect(),
        kind,
    })
}

/// Either calibration flavour, as consumed by the prediction functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Calibrator {
    Marginal(MarginalCalibrator),
    Conditional(ConditionalCalibrator),
}

impl Calibrator {
    pub fn kind(&self) -> ScoreKind {
        match self {
            Calibrator::Marginal(c) => c.kind,
            Calibrator::Conditional(c) => c.kind,
        }
    }

    pub fn alpha(&self) -> f64 {
        match self {
            Calibrator::Marginal(c) => c.alpha,
            Calibrator::Conditional(c) => c.alpha,
        }
    }

    /// Threshold governing label `y`.
    pub fn threshold(&self, y: usize) -> f64 {
        match self {
            Calibrator::Marginal(c) => c.q_hat,
            Calibrator::Conditional(c) => c.q_hat_per_label.get(y).copied().unwrap_or(f64::INFINITY),
        }
    }
}

impl From<MarginalCalibrator> for Calibrator {
    fn from(c: MarginalCalibrator) -> Self {
        Calibrator::Marginal(c)
    }
}

impl From<ConditionalCalibrator> for Calibrator {
    fn from(c: ConditionalCalibrator) -> Self {
        Calibrator::Conditional(c)
    }
}
