//! Coverage, set size, point accuracy and OOD AUC.

use serde::{Deserialize, Serialize};

use crate::conformal::PredictionSet;
use crate::error::{Error, Result};

fn same_len(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        })
    }
}

pub fn empirical_coverage(sets: &[PredictionSet], labels: &[usize]) -> Result<f64> {
    same_len(sets.len(), labels.len())?;
    if sets.is_empty() {
        return Err(Error::Empty("prediction sets"));
    }
    let hits = sets.iter().zip(labels).filter(|(s, &y)| s.contains(y)).count();
    Ok(hits as f64 / sets.len() as f64)
}

pub fn average_set_size(sets: &[PredictionSet]) -> Result<f64> {
    if sets.is_empty() {
        return Err(Error::Empty("prediction sets"));
    }
    Ok(sets.iter().map(PredictionSet::len).sum::<usize>() as f64 / sets.len() as f64)
}

/// Fraction of correct point predictions. Empty predictions count as errors
/// when `count_empty_as_error`, and are skipped otherwise.
pub fn point_accuracy(preds: &[PredictionSet], labels: &[usize], count_empty_as_error: bool) -> Result<f64> {
    same_len(preds.len(), labels.len())?;
    let (mut correct, mut counted) = (0usize, 0usize);
    for (p, &y) in preds.iter().zip(labels) {
        match p.len() {
            0 if !count_empty_as_error => {}
            0 => counted += 1,
            1 => {
                counted += 1;
                correct += usize::from(p.labels[0] == y);
            }
            n => return Err(Error::invalid("point prediction size", n, "at most 1")),
        }
    }
    if counted == 0 {
        return Err(Error::Empty("point predictions"));
    }
    Ok(correct as f64 / counted as f64)
}

/// Mann–Whitney statistic `P(ood > inlier) + ½ P(tie)` over all pairs,
/// computed exactly via sorting and binary search.
pub fn ood_auc(inlier_scores: &[f64], ood_scores: &[f64]) -> Result<f64> {
    if inlier_scores.is_empty() {
        return Err(Error::Empty("inlier scores"));
    }
    if ood_scores.is_empty() {
        return Err(Error::Empty("ood scores"));
    }
    if inlier_scores.iter().chain(ood_scores).any(|s| s.is_nan()) {
        return Err(Error::invalid("ood score", f64::NAN, "a number"));
    }
    let mut sorted = inlier_scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    // twice the U statistic, kept integral
    let mut doubled: u128 = 0;
    for &o in ood_scores {
        let below = sorted.partition_point(|&s| s < o);
        let not_above = sorted.partition_point(|&s| s <= o);
        doubled += 2 * below as u128 + (not_above - below) as u128;
    }
    Ok(doubled as f64 / (2.0 * inlier_scores.len() as f64 * ood_scores.len() as f64))
}

/// Mean and standard error (sample standard deviation over `√n`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub se: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let se = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, se })
    }
}
